#include "grnet/dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grnet/error.hpp"
#include "grnet/rng.hpp"

namespace grnet::dataset {

using planning::Blocksworld;
namespace bw = planning::bw;

void GRInstance::validate() const {
  if (trace.labels.empty()) throw Error(ErrorCode::kInvalidInstance, "instance without observations");
  if (goal_set.empty() || hidden_index >= goal_set.size())
    throw Error(ErrorCode::kInvalidInstance, "hidden goal index outside the goal set");
  for (std::size_t i = 0; i < goal_set.size(); ++i)
    for (std::size_t j = i + 1; j < goal_set.size(); ++j)
      if (goal_set[i] == goal_set[j]) throw Error(ErrorCode::kInvalidInstance, "duplicate goal in goal set");
}

std::size_t observation_count(std::size_t plan_len, double observability) {
  const auto k = static_cast<std::size_t>(std::llround(observability * static_cast<double>(plan_len)));
  return std::clamp<std::size_t>(k, 1, plan_len);
}

ObservationTrace sample_observations(const std::vector<std::string>& plan, double observability,
                                     std::uint64_t seed) {
  if (plan.empty()) throw Error(ErrorCode::kEmptyInput, "cannot observe an empty plan");
  if (!(observability > 0.0 && observability <= 1.0))
    throw Error(ErrorCode::kInvalidConfig, "observability must lie in (0, 1]");
  const std::size_t k = observation_count(plan.size(), observability);
  std::vector<std::size_t> idx(plan.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(plan.size() - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  ObservationTrace trace;
  trace.source_plan_len = plan.size();
  trace.observability = observability;
  for (auto i : idx) trace.labels.push_back(plan[i]);
  return trace;
}

ObservationTrace sample_observations(const std::vector<planning::GroundedAction>& plan, double observability,
                                     std::uint64_t seed) {
  std::vector<std::string> labels;
  labels.reserve(plan.size());
  for (const auto& a : plan) labels.push_back(a.label);
  return sample_observations(labels, observability, seed);
}

TrainingPair make_training_pair(const Blocksworld& bw, const State& init, const FluentSet& goal, double observability,
                                std::uint64_t seed) {
  if (goal.empty()) throw Error(ErrorCode::kInvalidInstance, "hidden goal must be non-empty");
  bw.decode_goal(goal);
  State start = init;
  for (std::uint64_t attempt = 0; planning::is_goal_satisfied(start, goal); ++attempt) {
    if (attempt == 100) throw Error(ErrorCode::kGenerationFailure, "goal satisfied by every resampled initial state");
    start = bw.random_state(derive_seed(seed, 1000 + attempt));
  }
  const auto plan = bw.generate_plan(start, goal, derive_seed(seed, 1));
  TrainingPair pair;
  pair.trace = sample_observations(plan, observability, derive_seed(seed, 2));
  pair.hidden_goal = goal;
  pair.seed = seed;
  return pair;
}

FluentSet random_goal(const Blocksworld& bw, const State& init, std::size_t size, std::uint64_t seed) {
  if (size == 0) throw Error(ErrorCode::kInvalidConfig, "goal size must be positive");
  for (std::uint64_t attempt = 0; attempt < 200; ++attempt) {
    const State target = bw.random_state(derive_seed(seed, attempt));
    std::vector<Fluent> on, on_table;
    for (const auto& f : target) {
      if (f.predicate() == bw::kOn) on.push_back(f);
      else if (f.predicate() == bw::kOnTable) on_table.push_back(f);
    }
    Rng rng(derive_seed(seed, 10000 + attempt));
    rng.shuffle(on);
    rng.shuffle(on_table);
    on.insert(on.end(), on_table.begin(), on_table.end());
    if (on.size() < size) continue;
    FluentSet goal(on.begin(), on.begin() + static_cast<std::ptrdiff_t>(size));
    if (!planning::is_goal_satisfied(init, goal)) return goal;
  }
  throw Error(ErrorCode::kGenerationFailure, "could not draw an unsatisfied goal");
}

namespace {

std::vector<Fluent> goal_fluents(const Blocksworld& bw) {
  std::vector<Fluent> out;
  for (const auto& f : bw.vocabulary().fluents())
    if (f.predicate() == bw::kOn || f.predicate() == bw::kOnTable) out.push_back(f);
  return out;
}

}  // namespace

GoalSetDraw generate_goal_set(const Blocksworld& bw, const FluentSet& hidden, std::size_t m, double overlap,
                              std::uint64_t seed) {
  if (m < 2) throw Error(ErrorCode::kInvalidConfig, "a goal set needs at least two goals");
  if (hidden.empty()) throw Error(ErrorCode::kInvalidConfig, "hidden goal must be non-empty");
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "overlap must lie in [0, 1]");
  bw.decode_goal(hidden);

  Rng rng(seed);
  const std::vector<Fluent> hidden_list(hidden.begin(), hidden.end());
  std::vector<Fluent> pool;
  for (const auto& f : goal_fluents(bw))
    if (!hidden.count(f)) pool.push_back(f);
  const double on_share =
      static_cast<double>(std::count_if(hidden_list.begin(), hidden_list.end(),
                                        [](const Fluent& f) { return f.predicate() == bw::kOn; })) /
      static_cast<double>(hidden_list.size());

  std::vector<FluentSet> goals{hidden};
  for (std::size_t k = 1; k < m; ++k) {
    bool added = false;
    for (int attempt = 0; attempt < 100 && !added; ++attempt) {
      const auto h = static_cast<std::int64_t>(hidden.size());
      const std::size_t size = static_cast<std::size_t>(std::max<std::int64_t>(1, h + rng.between(-1, 1)));
      std::size_t shared = 0;
      for (std::int64_t i = 0; i < h; ++i) shared += rng.bernoulli(overlap) ? 1 : 0;
      shared = std::min({shared, hidden.size() - 1, size});

      auto picks = hidden_list;
      rng.shuffle(picks);
      FluentSet goal(picks.begin(), picks.begin() + static_cast<std::ptrdiff_t>(shared));
      auto fresh = pool;
      rng.shuffle(fresh);
      while (goal.size() < size) {
        const bool want_on = rng.bernoulli(on_share);
        // consistent candidates of the wanted type first, then the other type
        bool grew = false;
        for (bool on_type : {want_on, !want_on}) {
          for (auto it = fresh.begin(); it != fresh.end() && !grew;) {
            if ((it->predicate() == bw::kOn) != on_type) {
              ++it;
              continue;
            }
            FluentSet trial = goal;
            trial.insert(*it);
            if (bw.is_consistent_goal(trial)) {
              goal = std::move(trial);
              grew = true;
            }
            it = fresh.erase(it);
          }
          if (grew) break;
        }
        if (!grew) break;
      }
      if (goal.size() != size || goal.empty()) continue;
      if (std::find(goals.begin(), goals.end(), goal) != goals.end()) continue;
      goals.push_back(std::move(goal));
      added = true;
    }
    if (!added) throw Error(ErrorCode::kGenerationFailure, "vocabulary too small for the requested goal set");
  }

  // hidden goal at a uniformly random position
  GoalSetDraw draw;
  draw.hidden_index = rng.below(m);
  std::swap(goals[0], goals[draw.hidden_index]);
  draw.goals = std::move(goals);
  return draw;
}

double recognizability(const FluentSet& goal, const std::vector<FluentSet>& goal_set) {
  if (std::find(goal_set.begin(), goal_set.end(), goal) == goal_set.end())
    throw Error(ErrorCode::kInvalidInstance, "goal is not a member of the goal set");
  double r = 0.0;
  for (const auto& f : goal) {
    const auto holders = std::count_if(goal_set.begin(), goal_set.end(), [&](const FluentSet& g) { return g.count(f) > 0; });
    r += 1.0 / static_cast<double>(holders);
  }
  return r;
}

double normalized_recognizability(const FluentSet& goal, const std::vector<FluentSet>& goal_set) {
  if (goal_set.size() < 2) throw Error(ErrorCode::kDegenerateNormalization, "R_Z needs at least two goals");
  const double r = recognizability(goal, goal_set);
  const double size = static_cast<double>(goal.size());
  if (size == 0.0) throw Error(ErrorCode::kDegenerateNormalization, "R_Z of an empty goal");
  const double floor = size / static_cast<double>(goal_set.size());
  return std::clamp((r - floor) / (size - floor), 0.0, 1.0);
}

int difficulty_bucket(double normalized) {
  // the epsilon keeps values such as 0.3 (computed as 0.2999...) in their class
  const int i = static_cast<int>(std::floor(normalized * 10.0 + 1e-9));
  return std::clamp(i, 1, 9);
}

RecognizabilityReport recognizability_report(const GRInstance& instance) {
  RecognizabilityReport rep;
  rep.raw = recognizability(instance.hidden_goal(), instance.goal_set);
  rep.normalized = normalized_recognizability(instance.hidden_goal(), instance.goal_set);
  rep.bucket = difficulty_bucket(rep.normalized);
  return rep;
}

std::map<int, std::vector<GRInstance>> bucket_instances(const std::vector<GRInstance>& instances) {
  std::map<int, std::vector<GRInstance>> out;
  for (const auto& inst : instances) out[recognizability_report(inst).bucket].push_back(inst);
  return out;
}

GRInstance as_instance(const TrainingPair& pair) { return GRInstance{pair.trace, {pair.hidden_goal}, 0, pair.seed}; }

TrainingPair as_training_pair(const GRInstance& instance) {
  return TrainingPair{instance.trace, instance.hidden_goal(), instance.seed};
}

}  // namespace grnet::dataset
