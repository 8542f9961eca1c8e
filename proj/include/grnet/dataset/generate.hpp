#pragma once

#include <cstdint>
#include <vector>

#include "grnet/dataset/dataset.hpp"

namespace grnet::dataset {

struct TrainingSetConfig {
  std::size_t n_blocks = 7;
  std::size_t num_pairs = 5000;
  double min_observability = 0.3;
  double max_observability = 0.7;
  std::size_t min_goal_size = 2;
  std::size_t max_goal_size = 4;
  std::size_t plans_per_problem = 4;
  std::uint64_t seed = 1;
};

std::vector<TrainingPair> generate_training_pairs(const planning::Blocksworld& bw, const TrainingSetConfig& config);

struct TestSetConfig {
  std::size_t n_blocks = 7;
  std::size_t num_goal_sets = 100;
  std::vector<double> observabilities{0.3, 0.5, 0.7};
  std::size_t min_goal_set_size = 5;
  std::size_t max_goal_set_size = 10;
  std::size_t min_goal_size = 2;
  std::size_t max_goal_size = 4;
  // goals of each set that serve as hidden goal of some instance
  std::size_t hidden_per_set = 2;
  double min_overlap = 0.0;
  double max_overlap = 1.0;
  std::uint64_t seed = 2;
};

// For every goal set: one initial state, one plan per hidden goal, one trace
// per observability level.
std::vector<GRInstance> generate_test_instances(const planning::Blocksworld& bw, const TestSetConfig& config);

// Instances spread over the difficulty classes: the overlap control steers
// R_Z and each candidate is kept only while its recomputed class still needs
// instances. Throws kGenerationFailure if a class cannot be filled.
std::vector<GRInstance> generate_bucket_instances(const planning::Blocksworld& bw, const TestSetConfig& config,
                                                  std::size_t per_bucket, double observability);

}  // namespace grnet::dataset
