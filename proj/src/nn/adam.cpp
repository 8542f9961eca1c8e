#include "grnet/nn/adam.hpp"

#include <cmath>

namespace grnet::nn {

template <typename T>
AdamState<T>::AdamState(const NetworkShape& shape, AdamConfig cfg)
    : config(cfg), first_moment(shape), second_moment(shape) {
  if (!(cfg.beta1 > 0 && cfg.beta1 < 1 && cfg.beta2 > 0 && cfg.beta2 < 1))
    throw Error(ErrorCode::kInvalidConfig, "Adam betas must lie in (0, 1)");
  if (!(cfg.learning_rate > 0) || !(cfg.epsilon > 0))
    throw Error(ErrorCode::kInvalidConfig, "Adam learning rate and epsilon must be positive");
}

template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> first, std::span<T> second,
                 std::uint64_t step, const AdamConfig& c) {
  if (grad.size() != param.size() || first.size() != param.size() || second.size() != param.size())
    throw Error(ErrorCode::kInvalidShape, "Adam tensor shape mismatch");
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
  const T b1 = static_cast<T>(c.beta1);
  const T b2 = static_cast<T>(c.beta2);
  const T lr = static_cast<T>(c.learning_rate);
  const T eps = static_cast<T>(c.epsilon);
  const T inv_c1 = static_cast<T>(1.0 / correction1);
  const T inv_c2 = static_cast<T>(1.0 / correction2);
  for (std::size_t k = 0; k < param.size(); ++k) {
    first[k] = b1 * first[k] + (T{1} - b1) * grad[k];
    second[k] = b2 * second[k] + (T{1} - b2) * grad[k] * grad[k];
    const T m_hat = first[k] * inv_c1;
    const T v_hat = second[k] * inv_c2;
    param[k] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

template <typename T>
void adam_step(ModelParams<T>& params, const ModelParams<T>& grads, AdamState<T>& state) {
  auto p = tensors(params);
  auto g = tensors(grads);
  auto m = tensors(state.first_moment);
  auto v = tensors(state.second_moment);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].values.size() != g[i].values.size() || p[i].values.size() != m[i].values.size())
      throw Error(ErrorCode::kInvalidShape, "Adam tensor shape mismatch on " + p[i].name);
    for (T x : g[i].values)
      if (!std::isfinite(x)) throw Error(ErrorCode::kTrainingDivergence, "non-finite gradient in " + g[i].name);
  }

  const std::uint64_t step = state.step_count + 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    adam_update<T>(p[i].values, g[i].values, m[i].values, v[i].values, step, state.config);
  for (T& x : params.embedding.row(0)) x = T{0};
  state.step_count = step;
}

template void adam_update<float>(std::span<float>, std::span<const float>, std::span<float>, std::span<float>,
                                 std::uint64_t, const AdamConfig&);
template void adam_update<double>(std::span<double>, std::span<const double>, std::span<double>,
                                  std::span<double>, std::uint64_t, const AdamConfig&);
template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(ModelParams<float>&, const ModelParams<float>&, AdamState<float>&);
template void adam_step<double>(ModelParams<double>&, const ModelParams<double>&, AdamState<double>&);

}  // namespace grnet::nn
