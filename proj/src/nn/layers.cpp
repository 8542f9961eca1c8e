#include "grnet/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "grnet/rng.hpp"

namespace grnet::nn {

namespace {

template <typename T>
Matrix<T> row_matrix(const Vector<T>& v) {
  Matrix<T> m(1, v.size());
  std::copy(v.begin(), v.end(), m.row_ptr(0));
  return m;
}

template <typename T>
Vector<T> row_vector(const Matrix<T>& m) {
  return Vector<T>(m.row_ptr(0), m.row_ptr(0) + m.cols());
}

}  // namespace

template <typename T>
LstmParams<T>::LstmParams(std::size_t input_size, std::size_t hidden_size)
    : w_f(hidden_size + input_size, hidden_size),
      w_i(hidden_size + input_size, hidden_size),
      w_o(hidden_size + input_size, hidden_size),
      w_c(hidden_size + input_size, hidden_size),
      b_f(hidden_size),
      b_i(hidden_size),
      b_o(hidden_size),
      b_c(hidden_size) {}

template <typename T>
void LstmParams<T>::validate() const {
  const std::size_t n = w_f.cols();
  if (n == 0 || w_f.rows() <= n) throw Error(ErrorCode::kInvalidShape, "LSTM weights must be (N+d) x N with N, d >= 1");
  for (const auto* w : {&w_i, &w_o, &w_c})
    if (!w->same_shape(w_f)) throw Error(ErrorCode::kInvalidShape, "LSTM gate weights differ in shape");
  for (const auto* b : {&b_f, &b_i, &b_o, &b_c})
    if (b->size() != n) throw Error(ErrorCode::kInvalidShape, "LSTM bias length differs from hidden size");
}

template <typename T>
AttentionParams<T>::AttentionParams(std::size_t hidden_size)
    : w_a(hidden_size, hidden_size), b_a(hidden_size), u_ctx(hidden_size) {}

template <typename T>
void AttentionParams<T>::validate() const {
  const std::size_t n = w_a.rows();
  if (n == 0 || w_a.cols() != n || b_a.size() != n || u_ctx.size() != n)
    throw Error(ErrorCode::kInvalidShape, "attention parameters must be N x N, N, N");
}

template <typename T>
Matrix<T> glorot_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::kInvalidShape, "glorot_init with a zero dimension");
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  Matrix<T> m(rows, cols);
  for (T& v : m.values()) v = static_cast<T>(rng.uniform(-limit, limit));
  return m;
}

namespace detail {

template <typename T>
void lstm_step(const Matrix<T>& h_in, const Matrix<T>& x, const Matrix<T>& c_prev, const LstmParams<T>& p,
               Matrix<T>& gate_i, Matrix<T>& gate_f, Matrix<T>& gate_o, Matrix<T>& gate_c, Matrix<T>& c,
               Matrix<T>& tanh_c, Matrix<T>& h) {
  const std::size_t n = p.hidden_size();
  const std::size_t d = p.input_size();
  struct Gate {
    const Matrix<T>& w;
    const Vector<T>& b;
    Matrix<T>& out;
  };
  for (Gate g : {Gate{p.w_i, p.b_i, gate_i}, Gate{p.w_f, p.b_f, gate_f}, Gate{p.w_o, p.b_o, gate_o},
                 Gate{p.w_c, p.b_c, gate_c}}) {
    g.out.fill(T{0});
    add_row_broadcast<T>(g.out, g.b);
    gemm_acc(h_in, 0, g.w, 0, n, g.out);
    gemm_acc(x, 0, g.w, n, d, g.out);
  }
  for (std::size_t r = 0; r < h.rows(); ++r) {
    T* gi = gate_i.row_ptr(r);
    T* gf = gate_f.row_ptr(r);
    T* go = gate_o.row_ptr(r);
    T* gc = gate_c.row_ptr(r);
    const T* cp = c_prev.row_ptr(r);
    T* cr = c.row_ptr(r);
    T* tc = tanh_c.row_ptr(r);
    T* hr = h.row_ptr(r);
    for (std::size_t j = 0; j < n; ++j) {
      gi[j] = sigmoid(gi[j]);
      gf[j] = sigmoid(gf[j]);
      go[j] = sigmoid(go[j]);
      gc[j] = std::tanh(gc[j]);
      cr[j] = gi[j] * gc[j] + gf[j] * cp[j];
      tc[j] = std::tanh(cr[j]);
      hr[j] = tc[j] * go[j];
    }
  }
}

template <typename T>
void masked_softmax(std::span<const T> scores, std::size_t length, std::span<T> out) {
  std::fill(out.begin(), out.end(), T{0});
  if (length == 0) return;
  T max_score = scores[0];
  for (std::size_t t = 1; t < length; ++t) max_score = std::max(max_score, scores[t]);
  T total{0};
  for (std::size_t t = 0; t < length; ++t) {
    out[t] = std::exp(scores[t] - max_score);
    total += out[t];
  }
  for (std::size_t t = 0; t < length; ++t) out[t] /= total;
}

}  // namespace detail

template <typename T>
CellRecord<T> lstm_cell_forward(const Vector<T>& x, const Vector<T>& h_prev, const Vector<T>& c_prev,
                                const LstmParams<T>& p) {
  p.validate();
  const std::size_t n = p.hidden_size();
  if (x.size() != p.input_size() || h_prev.size() != n || c_prev.size() != n)
    throw Error(ErrorCode::kInvalidShape, "lstm_cell_forward input sizes do not match parameters");
  Matrix<T> gi(1, n), gf(1, n), go(1, n), gc(1, n), c(1, n), tc(1, n), h(1, n);
  detail::lstm_step(row_matrix(h_prev), row_matrix(x), row_matrix(c_prev), p, gi, gf, go, gc, c, tc, h);
  return {row_vector(h), row_vector(c), row_vector(gi), row_vector(gf), row_vector(go), row_vector(gc)};
}

template <typename T>
SequenceRecord<T> lstm_sequence_forward(const std::vector<Vector<T>>& xs, const LstmParams<T>& p) {
  if (xs.empty()) throw Error(ErrorCode::kEmptyInput, "lstm_sequence_forward on an empty sequence");
  SequenceRecord<T> out;
  Vector<T> h(p.hidden_size(), T{0});
  Vector<T> c(p.hidden_size(), T{0});
  for (const auto& x : xs) {
    auto step = lstm_cell_forward(x, h, c, p);
    h = step.h;
    c = step.c;
    out.hs.push_back(step.h);
    out.steps.push_back(std::move(step));
  }
  return out;
}

template <typename T>
AttentionRecord<T> attention_forward(const std::vector<Vector<T>>& hs, const AttentionParams<T>& p) {
  if (hs.empty()) throw Error(ErrorCode::kEmptyInput, "attention_forward on an empty sequence");
  p.validate();
  const std::size_t n = p.hidden_size();
  Vector<T> scores(hs.size());
  for (std::size_t t = 0; t < hs.size(); ++t) {
    if (hs[t].size() != n) throw Error(ErrorCode::kInvalidShape, "hidden state size differs from attention size");
    Matrix<T> u(1, n);
    add_row_broadcast<T>(u, p.b_a);
    gemm_acc(row_matrix(hs[t]), 0, p.w_a, 0, n, u);
    T s{0};
    for (std::size_t j = 0; j < n; ++j) s += std::tanh(u(0, j)) * p.u_ctx[j];
    scores[t] = s;
  }
  AttentionRecord<T> out;
  out.alphas.assign(hs.size(), T{0});
  detail::masked_softmax<T>(scores, hs.size(), out.alphas);
  out.context.assign(n, T{0});
  for (std::size_t t = 0; t < hs.size(); ++t)
    for (std::size_t j = 0; j < n; ++j) out.context[j] += out.alphas[t] * hs[t][j];
  return out;
}

template <typename T>
Vector<T> dense_sigmoid_forward(const Vector<T>& context, const Matrix<T>& w_out, const Vector<T>& b_out) {
  if (w_out.rows() != context.size() || w_out.cols() != b_out.size())
    throw Error(ErrorCode::kInvalidShape, "dense layer shape mismatch");
  Matrix<T> z(1, b_out.size());
  add_row_broadcast<T>(z, b_out);
  gemm_acc(row_matrix(context), 0, w_out, 0, context.size(), z);
  Vector<T> out(b_out.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = sigmoid(z(0, j));
  return out;
}

template <typename T>
double bce_loss(const Vector<T>& preds, const Vector<T>& targets) {
  if (preds.size() != targets.size() || preds.empty())
    throw Error(ErrorCode::kInvalidShape, "bce_loss length mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < preds.size(); ++j) {
    const double p = std::clamp(static_cast<double>(preds[j]), kProbClamp, 1.0 - kProbClamp);
    const double t = static_cast<double>(targets[j]);
    total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return total / static_cast<double>(preds.size());
}

#define GRNET_INSTANTIATE_LAYERS(T)                                                                           \
  template struct LstmParams<T>;                                                                              \
  template struct AttentionParams<T>;                                                                         \
  template Matrix<T> glorot_init<T>(std::size_t, std::size_t, std::uint64_t);                                 \
  template CellRecord<T> lstm_cell_forward<T>(const Vector<T>&, const Vector<T>&, const Vector<T>&,           \
                                              const LstmParams<T>&);                                          \
  template SequenceRecord<T> lstm_sequence_forward<T>(const std::vector<Vector<T>>&, const LstmParams<T>&);   \
  template AttentionRecord<T> attention_forward<T>(const std::vector<Vector<T>>&, const AttentionParams<T>&); \
  template Vector<T> dense_sigmoid_forward<T>(const Vector<T>&, const Matrix<T>&, const Vector<T>&);          \
  template double bce_loss<T>(const Vector<T>&, const Vector<T>&);                                            \
  template void detail::lstm_step<T>(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&,                    \
                                     const LstmParams<T>&, Matrix<T>&, Matrix<T>&, Matrix<T>&, Matrix<T>&,    \
                                     Matrix<T>&, Matrix<T>&, Matrix<T>&);                                     \
  template void detail::masked_softmax<T>(std::span<const T>, std::size_t, std::span<T>);

GRNET_INSTANTIATE_LAYERS(float)
GRNET_INSTANTIATE_LAYERS(double)

}  // namespace grnet::nn
