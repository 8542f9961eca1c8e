#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "grnet/nn/network.hpp"

namespace grnet::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  std::uint64_t step_count = 0;
  ModelParams<T> first_moment;
  ModelParams<T> second_moment;

  AdamState() = default;
  AdamState(const NetworkShape& shape, AdamConfig cfg);
};

// Bias-corrected Adam update of one tensor, where `step` is the 1-based
// index of this update. Callers validate finiteness first.
template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> first, std::span<T> second,
                 std::uint64_t step, const AdamConfig& config);

// Bias-corrected Adam update of every tensor. Throws kTrainingDivergence (leaving params and
// state untouched) if any gradient component is not finite. The embedding
// padding row is kept at zero.
template <typename T>
void adam_step(ModelParams<T>& params, const ModelParams<T>& grads, AdamState<T>& state);

}  // namespace grnet::nn
