#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "grnet/nn/matrix.hpp"

namespace grnet::nn {

// Weight matrices map the concatenation [h_prev, x_t] (rows 0..N-1 hold the
// recurrent part, rows N..N+d-1 the input part) onto N gate pre-activations.
template <typename T>
struct LstmParams {
  Matrix<T> w_f, w_i, w_o, w_c;
  Vector<T> b_f, b_i, b_o, b_c;

  LstmParams() = default;
  LstmParams(std::size_t input_size, std::size_t hidden_size);

  std::size_t hidden_size() const noexcept { return w_f.cols(); }
  std::size_t input_size() const noexcept { return w_f.rows() - w_f.cols(); }
  void validate() const;
  bool operator==(const LstmParams&) const = default;
};

// Word attention: u_t = tanh(h_t W_a + b_a), alpha = softmax_t(u_t . u_ctx),
// context = sum_t alpha_t h_t.
template <typename T>
struct AttentionParams {
  Matrix<T> w_a;
  Vector<T> b_a;
  Vector<T> u_ctx;

  AttentionParams() = default;
  explicit AttentionParams(std::size_t hidden_size);

  std::size_t hidden_size() const noexcept { return w_a.rows(); }
  void validate() const;
  bool operator==(const AttentionParams&) const = default;
};

// Uniform in [-L, L] with L = sqrt(6 / (rows + cols)).
template <typename T>
Matrix<T> glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed);

template <typename T>
struct CellRecord {
  Vector<T> h, c;
  Vector<T> input_gate, forget_gate, output_gate, candidate;
};

template <typename T>
CellRecord<T> lstm_cell_forward(const Vector<T>& x, const Vector<T>& h_prev, const Vector<T>& c_prev,
                                const LstmParams<T>& p);

template <typename T>
struct SequenceRecord {
  std::vector<Vector<T>> hs;
  std::vector<CellRecord<T>> steps;  // everything the reverse pass needs
};

// h_0 = c_0 = 0.
template <typename T>
SequenceRecord<T> lstm_sequence_forward(const std::vector<Vector<T>>& xs, const LstmParams<T>& p);

template <typename T>
struct AttentionRecord {
  Vector<T> context;
  Vector<T> alphas;
};

template <typename T>
AttentionRecord<T> attention_forward(const std::vector<Vector<T>>& hs, const AttentionParams<T>& p);

template <typename T>
Vector<T> dense_sigmoid_forward(const Vector<T>& context, const Matrix<T>& w_out, const Vector<T>& b_out);

inline constexpr double kProbClamp = 1e-7;

// Mean binary cross-entropy over components, predictions clamped to
// [kProbClamp, 1 - kProbClamp].
template <typename T>
double bce_loss(const Vector<T>& preds, const Vector<T>& targets);

namespace detail {

// One LSTM step for a batch of rows. h_in is the (possibly dropout-masked)
// previous hidden state. Outputs must be pre-sized batch x N.
template <typename T>
void lstm_step(const Matrix<T>& h_in, const Matrix<T>& x, const Matrix<T>& c_prev, const LstmParams<T>& p,
               Matrix<T>& gate_i, Matrix<T>& gate_f, Matrix<T>& gate_o, Matrix<T>& gate_c, Matrix<T>& c,
               Matrix<T>& tanh_c, Matrix<T>& h);

// Softmax over the first `length` entries of scores, zero elsewhere.
template <typename T>
void masked_softmax(std::span<const T> scores, std::size_t length, std::span<T> out);

}  // namespace detail

template <typename T>
inline T sigmoid(T x) {
  if (x >= T{0}) return T{1} / (T{1} + std::exp(-x));
  const T e = std::exp(x);
  return e / (T{1} + e);
}

}  // namespace grnet::nn
