#include "grnet/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "grnet/rng.hpp"

namespace grnet::nn {

template <typename T>
ModelParams<T>::ModelParams(const NetworkShape& s)
    : embedding(s.num_actions + 1, s.embedding_dim),
      lstm(s.embedding_dim, s.hidden_size),
      attention(s.hidden_size),
      w_out(s.hidden_size, s.num_fluents),
      b_out(s.num_fluents) {}

template <typename T>
NetworkShape ModelParams<T>::shape() const {
  return {embedding.rows() == 0 ? 0 : embedding.rows() - 1, embedding.cols(), lstm.hidden_size(), b_out.size()};
}

template <typename T>
void ModelParams<T>::validate() const {
  if (embedding.rows() < 2 || embedding.cols() == 0) throw Error(ErrorCode::kInvalidShape, "embedding must be (|A|+1) x E");
  lstm.validate();
  attention.validate();
  if (lstm.input_size() != embedding.cols()) throw Error(ErrorCode::kInvalidShape, "LSTM input size differs from embedding size");
  if (attention.hidden_size() != lstm.hidden_size()) throw Error(ErrorCode::kInvalidShape, "attention size differs from LSTM size");
  if (w_out.rows() != lstm.hidden_size() || w_out.cols() != b_out.size() || b_out.empty())
    throw Error(ErrorCode::kInvalidShape, "output layer shape mismatch");
}

namespace {

template <typename P, typename T>
std::vector<TensorRef<T>> collect(P& p) {
  auto mat = [](const char* name, auto& m) {
    return TensorRef<T>{name, {m.rows(), m.cols()}, m.values()};
  };
  auto vec = [](const char* name, auto& v) { return TensorRef<T>{name, {v.size()}, std::span<T>(v)}; };
  return {mat("embedding", p.embedding),
          mat("lstm.w_f", p.lstm.w_f),
          mat("lstm.w_i", p.lstm.w_i),
          mat("lstm.w_o", p.lstm.w_o),
          mat("lstm.w_c", p.lstm.w_c),
          vec("lstm.b_f", p.lstm.b_f),
          vec("lstm.b_i", p.lstm.b_i),
          vec("lstm.b_o", p.lstm.b_o),
          vec("lstm.b_c", p.lstm.b_c),
          mat("attention.w_a", p.attention.w_a),
          vec("attention.b_a", p.attention.b_a),
          vec("attention.u_ctx", p.attention.u_ctx),
          mat("output.w", p.w_out),
          vec("output.b", p.b_out)};
}

template <typename T>
void copy_into(std::span<const double> from, std::span<T> to) {
  std::transform(from.begin(), from.end(), to.begin(), [](double v) { return static_cast<T>(v); });
}

}  // namespace

template <typename T>
std::vector<TensorRef<T>> tensors(ModelParams<T>& p) {
  return collect<ModelParams<T>, T>(p);
}

template <typename T>
std::vector<TensorRef<const T>> tensors(const ModelParams<T>& p) {
  return collect<const ModelParams<T>, const T>(p);
}

template <typename T>
ModelParams<T> init_params(const NetworkShape& s, std::uint64_t seed) {
  if (s.num_actions == 0 || s.embedding_dim == 0 || s.hidden_size == 0 || s.num_fluents == 0)
    throw Error(ErrorCode::kInvalidShape, "network dimensions must all be positive");
  ModelParams<T> p(s);
  Rng emb_rng(derive_seed(seed, 0));
  for (std::size_t r = 1; r < p.embedding.rows(); ++r)
    for (T& v : p.embedding.row(r)) v = static_cast<T>(emb_rng.uniform(-0.05, 0.05));
  const std::size_t n = s.hidden_size;
  const std::size_t fan_in = n + s.embedding_dim;
  p.lstm.w_f = glorot_init<T>(fan_in, n, derive_seed(seed, 1));
  p.lstm.w_i = glorot_init<T>(fan_in, n, derive_seed(seed, 2));
  p.lstm.w_o = glorot_init<T>(fan_in, n, derive_seed(seed, 3));
  p.lstm.w_c = glorot_init<T>(fan_in, n, derive_seed(seed, 4));
  p.attention.w_a = glorot_init<T>(n, n, derive_seed(seed, 5));
  const auto u = glorot_init<T>(n, 1, derive_seed(seed, 6));
  std::copy(u.values().begin(), u.values().end(), p.attention.u_ctx.begin());
  p.w_out = glorot_init<T>(n, s.num_fluents, derive_seed(seed, 7));
  return p;
}

template <typename T>
ModelParams<T> cast_params(const ModelParams<double>& p) {
  ModelParams<T> out(p.shape());
  auto src = tensors(p);
  auto dst = tensors(out);
  for (std::size_t i = 0; i < src.size(); ++i) copy_into<T>(src[i].values, dst[i].values);
  return out;
}

Batch Batch::from_sequences(const std::vector<std::vector<std::int32_t>>& seqs) {
  Batch b;
  b.size = seqs.size();
  for (const auto& s : seqs) b.steps = std::max(b.steps, s.size());
  b.indices.assign(b.size * b.steps, 0);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    std::copy(seqs[i].begin(), seqs[i].end(), b.indices.begin() + static_cast<std::ptrdiff_t>(i * b.steps));
    std::size_t len = seqs[i].size();
    while (len > 0 && seqs[i][len - 1] == 0) --len;
    b.lengths.push_back(len);
  }
  return b;
}

Batch Batch::single(const std::vector<std::int32_t>& seq) { return from_sequences({seq}); }

template <typename T>
void forward(const ModelParams<T>& p, const Batch& batch, ForwardCache<T>& cache, const DropoutMasks<T>* masks) {
  if (batch.size == 0 || batch.steps == 0) throw Error(ErrorCode::kEmptyInput, "forward on an empty batch");
  const std::size_t n_actions = p.embedding.rows();
  for (std::size_t b = 0; b < batch.size; ++b) {
    if (batch.lengths[b] == 0) throw Error(ErrorCode::kEmptyInput, "trace without any observed action");
    for (std::size_t t = 0; t < batch.steps; ++t) {
      const auto idx = batch.at(b, t);
      if (idx < 0 || static_cast<std::size_t>(idx) >= n_actions)
        throw Error(ErrorCode::kOutOfVocabulary, "action index " + std::to_string(idx) + " out of range");
      if (t < batch.lengths[b] && idx == 0)
        throw Error(ErrorCode::kInvalidInstance, "padding index inside a trace");
    }
  }

  const std::size_t bs = batch.size;
  const std::size_t steps = batch.steps;
  const std::size_t d = p.embedding.cols();
  const std::size_t n = p.lstm.hidden_size();
  const std::size_t f = p.b_out.size();

  cache.batch = bs;
  cache.steps = steps;
  cache.lengths = batch.lengths;
  cache.indices = batch.indices;
  cache.masks = masks ? *masks : DropoutMasks<T>{};
  const bool input_dropout = !cache.masks.input.empty();
  const bool recurrent_dropout = !cache.masks.recurrent.empty();
  if (input_dropout && (cache.masks.input.rows() != bs || cache.masks.input.cols() != d))
    throw Error(ErrorCode::kInvalidShape, "input dropout mask shape");
  if (recurrent_dropout && (cache.masks.recurrent.rows() != bs || cache.masks.recurrent.cols() != n))
    throw Error(ErrorCode::kInvalidShape, "recurrent dropout mask shape");

  for (auto* v : {&cache.x, &cache.h_in, &cache.h, &cache.c, &cache.tanh_c, &cache.gate_i, &cache.gate_f,
                  &cache.gate_o, &cache.gate_c, &cache.u})
    v->resize(steps);

  Matrix<T> zeros(bs, n);
  for (std::size_t t = 0; t < steps; ++t) {
    Matrix<T>& x = cache.x[t];
    x.resize(bs, d);
    for (std::size_t b = 0; b < bs; ++b) {
      const auto row = p.embedding.row(static_cast<std::size_t>(batch.at(b, t)));
      T* xr = x.row_ptr(b);
      for (std::size_t k = 0; k < d; ++k) xr[k] = input_dropout ? row[k] * cache.masks.input(b, k) : row[k];
    }
    const Matrix<T>& h_prev = t == 0 ? zeros : cache.h[t - 1];
    const Matrix<T>& c_prev = t == 0 ? zeros : cache.c[t - 1];
    Matrix<T>& h_in = cache.h_in[t];
    h_in = h_prev;
    if (recurrent_dropout)
      for (std::size_t b = 0; b < bs; ++b)
        for (std::size_t j = 0; j < n; ++j) h_in(b, j) *= cache.masks.recurrent(b, j);
    for (auto* m : {&cache.gate_i[t], &cache.gate_f[t], &cache.gate_o[t], &cache.gate_c[t], &cache.c[t],
                    &cache.tanh_c[t], &cache.h[t]})
      m->resize(bs, n);
    detail::lstm_step(h_in, x, c_prev, p.lstm, cache.gate_i[t], cache.gate_f[t], cache.gate_o[t], cache.gate_c[t],
                      cache.c[t], cache.tanh_c[t], cache.h[t]);
  }

  // attention
  Matrix<T> scores(bs, steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Matrix<T>& u = cache.u[t];
    u.resize(bs, n);
    add_row_broadcast<T>(u, p.attention.b_a);
    gemm_acc(cache.h[t], 0, p.attention.w_a, 0, n, u);
    for (std::size_t b = 0; b < bs; ++b) {
      T* ur = u.row_ptr(b);
      T s{0};
      for (std::size_t j = 0; j < n; ++j) {
        ur[j] = std::tanh(ur[j]);
        s += ur[j] * p.attention.u_ctx[j];
      }
      scores(b, t) = s;
    }
  }
  cache.alphas.resize(bs, steps);
  cache.context.resize(bs, n);
  for (std::size_t b = 0; b < bs; ++b) {
    detail::masked_softmax<T>(scores.row(b), batch.lengths[b], cache.alphas.row(b));
    T* ctx = cache.context.row_ptr(b);
    for (std::size_t t = 0; t < batch.lengths[b]; ++t) {
      const T a = cache.alphas(b, t);
      const T* hr = cache.h[t].row_ptr(b);
      for (std::size_t j = 0; j < n; ++j) ctx[j] += a * hr[j];
    }
  }

  cache.logits.resize(bs, f);
  add_row_broadcast<T>(cache.logits, p.b_out);
  gemm_acc(cache.context, 0, p.w_out, 0, n, cache.logits);
  cache.preds.resize(bs, f);
  for (std::size_t b = 0; b < bs; ++b)
    for (std::size_t j = 0; j < f; ++j) cache.preds(b, j) = sigmoid(cache.logits(b, j));
}

template <typename T>
Vector<T> predict(const ModelParams<T>& p, const std::vector<std::int32_t>& indices) {
  if (indices.empty()) throw Error(ErrorCode::kEmptyInput, "empty trace");
  ForwardCache<T> cache;
  forward(p, Batch::single(indices), cache);
  return Vector<T>(cache.preds.row_ptr(0), cache.preds.row_ptr(0) + cache.preds.cols());
}

template <typename T>
double batch_loss(const ForwardCache<T>& cache, const Matrix<T>& targets) {
  if (!targets.same_shape(cache.preds)) throw Error(ErrorCode::kInvalidShape, "target matrix shape");
  double total = 0.0;
  for (std::size_t b = 0; b < cache.batch; ++b) {
    const Vector<T> p(cache.preds.row_ptr(b), cache.preds.row_ptr(b) + cache.preds.cols());
    const Vector<T> t(targets.row_ptr(b), targets.row_ptr(b) + targets.cols());
    total += bce_loss(p, t);
  }
  return total / static_cast<double>(cache.batch);
}

template <typename T>
ModelParams<T> backward(const ForwardCache<T>& cache, const Matrix<T>& targets, const ModelParams<T>& p,
                        T loss_scale) {
  const std::size_t bs = cache.batch;
  const std::size_t steps = cache.steps;
  const std::size_t d = p.embedding.cols();
  const std::size_t n = p.lstm.hidden_size();
  const std::size_t f = p.b_out.size();
  if (bs == 0 || cache.h.size() != steps || cache.preds.rows() != bs || cache.preds.cols() != f ||
      cache.context.cols() != n || (steps > 0 && cache.x[0].cols() != d))
    throw Error(ErrorCode::kInvalidState, "forward cache does not match parameters");
  if (!targets.same_shape(cache.preds)) throw Error(ErrorCode::kInvalidShape, "target matrix shape");

  ModelParams<T> g(p.shape());

  // sigmoid + clamped BCE: dL/dz = (p - t) / (F * B) inside the clamp, 0 outside
  Matrix<T> dz(bs, f);
  const T lo = static_cast<T>(kProbClamp);
  const T hi = static_cast<T>(1.0 - kProbClamp);
  const T norm = loss_scale / static_cast<T>(f * bs);
  for (std::size_t b = 0; b < bs; ++b)
    for (std::size_t j = 0; j < f; ++j) {
      const T pr = cache.preds(b, j);
      dz(b, j) = (pr < lo || pr > hi) ? T{0} : (pr - targets(b, j)) * norm;
    }

  gemm_at_acc(cache.context, 0, n, dz, g.w_out, 0);
  column_sum_acc<T>(dz, g.b_out);
  Matrix<T> dctx(bs, n);
  gemm_bt_acc(dz, transpose(p.w_out), 0, n, dctx, 0);

  // attention
  std::vector<Matrix<T>> dh(steps, Matrix<T>(bs, n));
  Matrix<T> ds(bs, steps);
  for (std::size_t b = 0; b < bs; ++b) {
    const T* dc = dctx.row_ptr(b);
    T weighted{0};
    for (std::size_t t = 0; t < cache.lengths[b]; ++t) {
      const T* hr = cache.h[t].row_ptr(b);
      T da{0};
      for (std::size_t j = 0; j < n; ++j) da += dc[j] * hr[j];
      ds(b, t) = da;
      weighted += cache.alphas(b, t) * da;
      const T a = cache.alphas(b, t);
      T* dhr = dh[t].row_ptr(b);
      for (std::size_t j = 0; j < n; ++j) dhr[j] = a * dc[j];
    }
    for (std::size_t t = 0; t < cache.lengths[b]; ++t) ds(b, t) = cache.alphas(b, t) * (ds(b, t) - weighted);
  }
  const Matrix<T> w_a_t = transpose(p.attention.w_a);
  Matrix<T> dpre(bs, n);
  for (std::size_t t = 0; t < steps; ++t) {
    dpre.fill(T{0});
    for (std::size_t b = 0; b < bs; ++b) {
      if (t >= cache.lengths[b]) continue;
      const T s = ds(b, t);
      const T* ur = cache.u[t].row_ptr(b);
      T* dp = dpre.row_ptr(b);
      for (std::size_t j = 0; j < n; ++j) {
        g.attention.u_ctx[j] += s * ur[j];
        dp[j] = s * p.attention.u_ctx[j] * (T{1} - ur[j] * ur[j]);
      }
    }
    gemm_at_acc(cache.h[t], 0, n, dpre, g.attention.w_a, 0);
    column_sum_acc<T>(dpre, g.attention.b_a);
    gemm_bt_acc(dpre, w_a_t, 0, n, dh[t], 0);
  }

  // LSTM, back through time
  const Matrix<T> wt_i = transpose(p.lstm.w_i);
  const Matrix<T> wt_f = transpose(p.lstm.w_f);
  const Matrix<T> wt_o = transpose(p.lstm.w_o);
  const Matrix<T> wt_c = transpose(p.lstm.w_c);
  const bool input_dropout = !cache.masks.input.empty();
  const bool recurrent_dropout = !cache.masks.recurrent.empty();
  Matrix<T> dh_next(bs, n), dc_next(bs, n);
  Matrix<T> dz_i(bs, n), dz_f(bs, n), dz_o(bs, n), dz_c(bs, n);
  Matrix<T> dh_in(bs, n), dx(bs, d);
  const Matrix<T> zeros(bs, n);
  for (std::size_t tt = steps; tt > 0; --tt) {
    const std::size_t t = tt - 1;
    const Matrix<T>& c_prev = t == 0 ? zeros : cache.c[t - 1];
    for (std::size_t b = 0; b < bs; ++b) {
      const T* gi = cache.gate_i[t].row_ptr(b);
      const T* gf = cache.gate_f[t].row_ptr(b);
      const T* go = cache.gate_o[t].row_ptr(b);
      const T* gc = cache.gate_c[t].row_ptr(b);
      const T* tc = cache.tanh_c[t].row_ptr(b);
      const T* cp = c_prev.row_ptr(b);
      const T* dha = dh[t].row_ptr(b);
      T* dhn = dh_next.row_ptr(b);
      T* dcn = dc_next.row_ptr(b);
      T* zi = dz_i.row_ptr(b);
      T* zf = dz_f.row_ptr(b);
      T* zo = dz_o.row_ptr(b);
      T* zc = dz_c.row_ptr(b);
      for (std::size_t j = 0; j < n; ++j) {
        const T dhj = dha[j] + dhn[j];
        const T dcj = dhj * go[j] * (T{1} - tc[j] * tc[j]) + dcn[j];
        zo[j] = dhj * tc[j] * go[j] * (T{1} - go[j]);
        zi[j] = dcj * gc[j] * gi[j] * (T{1} - gi[j]);
        zf[j] = dcj * cp[j] * gf[j] * (T{1} - gf[j]);
        zc[j] = dcj * gi[j] * (T{1} - gc[j] * gc[j]);
        dcn[j] = dcj * gf[j];
      }
    }
    dh_in.fill(T{0});
    dx.fill(T{0});
    struct GateGrad {
      const Matrix<T>& dz;
      const Matrix<T>& wt;
      Matrix<T>& w;
      Vector<T>& b;
    };
    for (GateGrad gg : {GateGrad{dz_i, wt_i, g.lstm.w_i, g.lstm.b_i}, GateGrad{dz_f, wt_f, g.lstm.w_f, g.lstm.b_f},
                        GateGrad{dz_o, wt_o, g.lstm.w_o, g.lstm.b_o}, GateGrad{dz_c, wt_c, g.lstm.w_c, g.lstm.b_c}}) {
      gemm_at_acc(cache.h_in[t], 0, n, gg.dz, gg.w, 0);
      gemm_at_acc(cache.x[t], 0, d, gg.dz, gg.w, n);
      column_sum_acc<T>(gg.dz, gg.b);
      gemm_bt_acc(gg.dz, gg.wt, 0, n, dh_in, 0);
      gemm_bt_acc(gg.dz, gg.wt, n, d, dx, 0);
    }
    for (std::size_t b = 0; b < bs; ++b) {
      T* dhn = dh_next.row_ptr(b);
      const T* dhi = dh_in.row_ptr(b);
      for (std::size_t j = 0; j < n; ++j) dhn[j] = recurrent_dropout ? dhi[j] * cache.masks.recurrent(b, j) : dhi[j];
      const auto idx = static_cast<std::size_t>(cache.indices[b * steps + t]);
      if (idx == 0) continue;
      T* ge = g.embedding.row_ptr(idx);
      const T* dxr = dx.row_ptr(b);
      for (std::size_t k = 0; k < d; ++k) ge[k] += input_dropout ? dxr[k] * cache.masks.input(b, k) : dxr[k];
    }
  }
  return g;
}

#define GRNET_INSTANTIATE_NETWORK(T)                                                                          \
  template struct ModelParams<T>;                                                                             \
  template std::vector<TensorRef<T>> tensors<T>(ModelParams<T>&);                                             \
  template std::vector<TensorRef<const T>> tensors<T>(const ModelParams<T>&);                                 \
  template ModelParams<T> init_params<T>(const NetworkShape&, std::uint64_t);                                 \
  template ModelParams<T> cast_params<T>(const ModelParams<double>&);                                         \
  template void forward<T>(const ModelParams<T>&, const Batch&, ForwardCache<T>&, const DropoutMasks<T>*);    \
  template Vector<T> predict<T>(const ModelParams<T>&, const std::vector<std::int32_t>&);                     \
  template double batch_loss<T>(const ForwardCache<T>&, const Matrix<T>&);                                    \
  template ModelParams<T> backward<T>(const ForwardCache<T>&, const Matrix<T>&, const ModelParams<T>&, T);

GRNET_INSTANTIATE_NETWORK(float)
GRNET_INSTANTIATE_NETWORK(double)

}  // namespace grnet::nn
