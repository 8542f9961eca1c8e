#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "grnet/planning/blocksworld.hpp"

namespace grnet::dataset {

using planning::Fluent;
using planning::FluentSet;
using planning::State;

struct ObservationTrace {
  std::vector<std::string> labels;
  std::size_t source_plan_len = 0;
  double observability = 1.0;

  bool operator==(const ObservationTrace&) const = default;
};

struct TrainingPair {
  ObservationTrace trace;
  FluentSet hidden_goal;
  std::uint64_t seed = 0;

  bool operator==(const TrainingPair&) const = default;
};

struct GRInstance {
  ObservationTrace trace;
  std::vector<FluentSet> goal_set;
  std::size_t hidden_index = 0;
  std::uint64_t seed = 0;

  const FluentSet& hidden_goal() const { return goal_set.at(hidden_index); }
  // Invariants: hidden goal present exactly once, goals distinct, trace
  // non-empty. Throws kInvalidInstance.
  void validate() const;
  bool operator==(const GRInstance&) const = default;
};

// max(1, round(observability * plan_len)).
std::size_t observation_count(std::size_t plan_len, double observability);

// Uniformly random order-preserving selection of observation_count actions.
ObservationTrace sample_observations(const std::vector<std::string>& plan, double observability,
                                     std::uint64_t seed);
ObservationTrace sample_observations(const std::vector<planning::GroundedAction>& plan, double observability,
                                     std::uint64_t seed);

// Plans from init to goal and samples the trace. When init already satisfies
// the goal, fresh initial states are drawn from the seed until it does not.
TrainingPair make_training_pair(const planning::Blocksworld& bw, const State& init, const FluentSet& goal,
                                double observability, std::uint64_t seed);

// Goal of `size` On / On-Table fluents taken from a random configuration
// (On fluents first), not already satisfied by init.
FluentSet random_goal(const planning::Blocksworld& bw, const State& init, std::size_t size, std::uint64_t seed);

struct GoalSetDraw {
  std::vector<FluentSet> goals;
  std::size_t hidden_index = 0;
};

// m distinct consistent goals including `hidden` at a random position. Each
// distractor has |hidden| +-1 fluents; the number drawn from the hidden goal
// is Binomial(|hidden|, overlap), capped at |hidden| - 1, so overlap * |hidden|
// fluents are shared on average.
GoalSetDraw generate_goal_set(const planning::Blocksworld& bw, const FluentSet& hidden, std::size_t m,
                              double overlap, std::uint64_t seed);

// R(G) = sum over f in G of 1 / |{G' in goal_set : f in G'}|.
double recognizability(const FluentSet& goal, const std::vector<FluentSet>& goal_set);

// (R - |G|/m) / (|G| - |G|/m), clamped to [0, 1].
double normalized_recognizability(const FluentSet& goal, const std::vector<FluentSet>& goal_set);

struct RecognizabilityReport {
  double raw = 0.0;
  double normalized = 0.0;
  int bucket = 1;
};

// Class i when 0.1 i <= R_Z < 0.1 (i + 1); values below 0.1 fall into C1 and
// R_Z = 1 into C9.
int difficulty_bucket(double normalized);

RecognizabilityReport recognizability_report(const GRInstance& instance);

std::map<int, std::vector<GRInstance>> bucket_instances(const std::vector<GRInstance>& instances);

// Pairs are stored as single-goal instances.
GRInstance as_instance(const TrainingPair& pair);
TrainingPair as_training_pair(const GRInstance& instance);

}  // namespace grnet::dataset
