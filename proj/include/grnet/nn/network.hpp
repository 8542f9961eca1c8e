#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grnet/nn/layers.hpp"

namespace grnet::nn {

struct NetworkShape {
  std::size_t num_actions = 0;  // embedding has num_actions + 1 rows, row 0 is padding
  std::size_t embedding_dim = 0;
  std::size_t hidden_size = 0;
  std::size_t num_fluents = 0;

  bool operator==(const NetworkShape&) const = default;
};

// Trainable tensors of the full embedding -> LSTM -> attention -> sigmoid
// network. Gradients use the same type.
template <typename T>
struct ModelParams {
  Matrix<T> embedding;
  LstmParams<T> lstm;
  AttentionParams<T> attention;
  Matrix<T> w_out;
  Vector<T> b_out;

  ModelParams() = default;
  explicit ModelParams(const NetworkShape& shape);  // all zeros

  NetworkShape shape() const;
  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

template <typename T>
struct TensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<T> values;
};

// Stable, named view of every tensor, in checkpoint order.
template <typename T>
std::vector<TensorRef<T>> tensors(ModelParams<T>& p);
template <typename T>
std::vector<TensorRef<const T>> tensors(const ModelParams<T>& p);

// Glorot for LSTM, attention and output weights; embedding uniform in
// [-0.05, 0.05] with the padding row at zero; biases and u_ctx follow the
// same rules as their layer (biases zero, u_ctx Glorot as an N x 1 column).
template <typename T>
ModelParams<T> init_params(const NetworkShape& shape, std::uint64_t seed);

template <typename T>
ModelParams<T> cast_params(const ModelParams<double>& p);

// Padded batch of action-index sequences. indices is batch x steps row-major;
// index 0 marks padding and may only appear after a sequence's last real step.
struct Batch {
  std::size_t size = 0;
  std::size_t steps = 0;
  std::vector<std::int32_t> indices;
  std::vector<std::size_t> lengths;

  static Batch from_sequences(const std::vector<std::vector<std::int32_t>>& seqs);
  // Keeps the given padded length (for padding-neutrality checks).
  static Batch single(const std::vector<std::int32_t>& seq);
  std::int32_t at(std::size_t b, std::size_t t) const { return indices[b * steps + t]; }
};

// Inverted dropout masks, fixed per sequence across time. Empty = inactive.
template <typename T>
struct DropoutMasks {
  Matrix<T> input;      // batch x embedding_dim
  Matrix<T> recurrent;  // batch x hidden
};

template <typename T>
struct ForwardCache {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::vector<std::size_t> lengths;
  std::vector<std::int32_t> indices;
  DropoutMasks<T> masks;
  // per step, batch x dim
  std::vector<Matrix<T>> x, h_in, h, c, tanh_c, gate_i, gate_f, gate_o, gate_c, u;
  Matrix<T> alphas;   // batch x steps (zero on padded steps)
  Matrix<T> context;  // batch x hidden
  Matrix<T> logits;   // batch x fluents
  Matrix<T> preds;    // batch x fluents
};

template <typename T>
void forward(const ModelParams<T>& p, const Batch& batch, ForwardCache<T>& cache,
             const DropoutMasks<T>* masks = nullptr);

// Single trace, no dropout.
template <typename T>
Vector<T> predict(const ModelParams<T>& p, const std::vector<std::int32_t>& indices);

// Mean over the batch of the per-sample mean BCE.
template <typename T>
double batch_loss(const ForwardCache<T>& cache, const Matrix<T>& targets);

// Gradient of loss_scale * batch_loss w.r.t. every tensor of p. The padding
// embedding row never receives gradient.
template <typename T>
ModelParams<T> backward(const ForwardCache<T>& cache, const Matrix<T>& targets, const ModelParams<T>& p,
                        T loss_scale = T{1});

}  // namespace grnet::nn
