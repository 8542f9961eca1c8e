#include <cmath>
#include <limits>

#include "doctest.h"
#include "grnet/nn/adam.hpp"
#include "grnet/nn/layers.hpp"
#include "grnet/nn/network.hpp"
#include "grnet/rng.hpp"
#include "support/gradcheck.hpp"

using namespace grnet;
using namespace grnet::nn;

namespace {

LstmParams<double> random_lstm(std::size_t d, std::size_t n, std::uint64_t seed) {
  LstmParams<double> p(d, n);
  p.w_f = glorot_init<double>(n + d, n, seed);
  p.w_i = glorot_init<double>(n + d, n, seed + 1);
  p.w_o = glorot_init<double>(n + d, n, seed + 2);
  p.w_c = glorot_init<double>(n + d, n, seed + 3);
  Rng rng(seed);
  for (auto* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_c})
    for (double& v : *b) v = rng.uniform(-1, 1);
  return p;
}

std::vector<Vector<double>> random_inputs(std::size_t steps, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector<double>> xs(steps, Vector<double>(d));
  for (auto& x : xs)
    for (double& v : x) v = rng.uniform(-3, 3);
  return xs;
}

}  // namespace

TEST_CASE("glorot_init bounds, statistics and determinism") {
  const auto small = glorot_init<double>(1, 5, 7);
  for (double v : small.values()) CHECK(std::abs(v) <= 1.0);

  const auto big = glorot_init<double>(100, 100, 11);
  const double limit = std::sqrt(6.0 / 200.0);
  double sum = 0;
  for (double v : big.values()) {
    CHECK(std::abs(v) <= limit);
    sum += v;
  }
  CHECK(std::abs(sum / big.size()) < 0.02);

  CHECK(glorot_init<double>(100, 100, 11) == big);
  CHECK_FALSE(glorot_init<double>(100, 100, 12) == big);
  CHECK_THROWS_AS(glorot_init<double>(0, 3, 1), Error);
}

TEST_CASE("lstm cell with zero parameters") {
  LstmParams<double> p(2, 3);
  const auto rec = lstm_cell_forward<double>({0.4, -1.0}, {0.1, 0.2, 0.3}, {0, 0, 0}, p);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(rec.input_gate[j] == 0.5);
    CHECK(rec.forget_gate[j] == 0.5);
    CHECK(rec.output_gate[j] == 0.5);
    CHECK(rec.candidate[j] == 0.0);
    CHECK(rec.c[j] == 0.0);
    CHECK(rec.h[j] == 0.0);
  }
}

TEST_CASE("lstm cell scalar hand calculation") {
  LstmParams<double> p(1, 1);
  for (auto* w : {&p.w_f, &p.w_i, &p.w_o, &p.w_c}) w->fill(1.0);
  const auto rec = lstm_cell_forward<double>({1.0}, {0.0}, {0.0}, p);
  CHECK(rec.input_gate[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  CHECK(rec.forget_gate[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  CHECK(rec.output_gate[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  CHECK(rec.candidate[0] == doctest::Approx(0.7615941559557649).epsilon(1e-14));
  CHECK(rec.c[0] == doctest::Approx(0.5567699411459397).epsilon(1e-14));
  CHECK(rec.h[0] == doctest::Approx(0.36960635293570576).epsilon(1e-14));
}

TEST_CASE("lstm cell concatenation order is (h_prev, x)") {
  LstmParams<double> p(1, 1);
  // only the recurrent row of the candidate weights is non-zero
  p.w_c(0, 0) = 1.0;
  p.w_i.fill(0.0);
  const auto from_h = lstm_cell_forward<double>({0.0}, {0.5}, {0.0}, p);
  const auto from_x = lstm_cell_forward<double>({0.5}, {0.0}, {0.0}, p);
  CHECK(from_h.candidate[0] == doctest::Approx(std::tanh(0.5)));
  CHECK(from_x.candidate[0] == 0.0);
}

TEST_CASE("lstm cell activations respect their codomains") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_lstm(3, 4, seed);
    const auto xs = random_inputs(1, 3, seed + 100);
    const auto rec = lstm_cell_forward<double>(xs[0], {0.9, -0.9, 0.2, 0.0}, {2.0, -3.0, 0.5, 1.0}, p);
    for (std::size_t j = 0; j < 4; ++j) {
      for (double g : {rec.input_gate[j], rec.forget_gate[j], rec.output_gate[j]}) CHECK((g > 0 && g < 1));
      CHECK(std::abs(rec.candidate[j]) < 1);
      CHECK(std::abs(rec.h[j]) < 1);
    }
  }
}

TEST_CASE("lstm cell rejects mismatched dimensions") {
  LstmParams<double> p(2, 3);
  CHECK_THROWS_AS(lstm_cell_forward<double>({1.0}, {0, 0, 0}, {0, 0, 0}, p), Error);
  CHECK_THROWS_AS(lstm_cell_forward<double>({1.0, 2.0}, {0, 0}, {0, 0, 0}, p), Error);
}

TEST_CASE("lstm sequence forward") {
  const auto p = random_lstm(2, 3, 5);
  const auto xs = random_inputs(6, 2, 9);

  SUBCASE("length one equals a single cell from zero state") {
    const auto seq = lstm_sequence_forward<double>({xs[0]}, p);
    const auto cell = lstm_cell_forward<double>(xs[0], {0, 0, 0}, {0, 0, 0}, p);
    CHECK(seq.hs[0] == cell.h);
  }
  SUBCASE("prefix causality") {
    const auto full = lstm_sequence_forward<double>(xs, p);
    for (std::size_t len = 1; len <= xs.size(); ++len) {
      const auto prefix = lstm_sequence_forward<double>({xs.begin(), xs.begin() + len}, p);
      for (std::size_t t = 0; t < len; ++t) CHECK(prefix.hs[t] == full.hs[t]);
    }
  }
  SUBCASE("zero parameters give zero outputs") {
    const auto seq = lstm_sequence_forward<double>(xs, LstmParams<double>(2, 3));
    for (const auto& h : seq.hs)
      for (double v : h) CHECK(v == 0.0);
  }
  SUBCASE("empty sequence") {
    CHECK_THROWS_AS(lstm_sequence_forward<double>({}, p), Error);
  }
}

TEST_CASE("attention forward") {
  AttentionParams<double> p(3);
  p.w_a = glorot_init<double>(3, 3, 1);
  p.b_a = {0.1, -0.2, 0.3};
  p.u_ctx = {0.7, -1.1, 0.4};
  const std::vector<Vector<double>> hs{{0.1, 0.2, 0.3}, {-0.5, 0.4, 0.0}, {0.9, -0.9, 0.1}};

  SUBCASE("single step") {
    const auto rec = attention_forward<double>({hs[0]}, p);
    CHECK(rec.alphas == Vector<double>{1.0});
    CHECK(rec.context == hs[0]);
  }
  SUBCASE("identical states") {
    const auto rec = attention_forward<double>({hs[1], hs[1], hs[1], hs[1]}, p);
    for (std::size_t j = 0; j < 3; ++j) CHECK(rec.context[j] == doctest::Approx(hs[1][j]).epsilon(1e-15));
  }
  SUBCASE("zero query gives uniform weights") {
    p.u_ctx = {0, 0, 0};
    const auto rec = attention_forward<double>(hs, p);
    for (double a : rec.alphas) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(rec.context[j] == doctest::Approx((hs[0][j] + hs[1][j] + hs[2][j]) / 3.0).epsilon(1e-14));
  }
  SUBCASE("weights form a distribution") {
    const auto rec = attention_forward<double>(hs, p);
    double total = 0;
    for (double a : rec.alphas) {
      CHECK(a >= 0);
      total += a;
    }
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(attention_forward<double>({}, p), Error);
  }
}

TEST_CASE("dense sigmoid layer") {
  Matrix<double> w(2, 3);
  CHECK(dense_sigmoid_forward<double>({0, 0}, w, {0, 0, 0}) == Vector<double>{0.5, 0.5, 0.5});
  const auto saturated = dense_sigmoid_forward<double>({0, 0}, w, {20, 0, 0});
  CHECK(saturated[0] > 0.999999);
  CHECK(saturated[0] < 1.0);

  Matrix<double> w1(1, 1, 2.0);
  CHECK(dense_sigmoid_forward<double>({1.0}, w1, {-2.0})[0] == 0.5);
  CHECK_THROWS_AS(dense_sigmoid_forward<double>({1.0, 2.0}, w1, {0.0}), Error);
}

TEST_CASE("binary cross-entropy") {
  CHECK(bce_loss<double>({1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}) == doctest::Approx(-std::log(1.0 - 1e-7)).epsilon(1e-9));
  CHECK(bce_loss<double>({0.5, 0.5, 0.5, 0.5}, {1, 0, 0, 1}) == doctest::Approx(0.6931471805599453).epsilon(1e-14));
  CHECK(bce_loss<double>({0.9}, {1.0}) == doctest::Approx(0.10536051565782628).epsilon(1e-14));
  CHECK_THROWS_AS(bce_loss<double>({0.5}, {1.0, 0.0}), Error);
}

TEST_CASE("network forward with zero parameters") {
  const ModelParams<double> p(NetworkShape{6, 3, 4, 5});
  for (double v : predict(p, {1, 2, 3})) CHECK(v == 0.5);
}

TEST_CASE("network forward rejects bad traces") {
  const auto p = init_params<double>(NetworkShape{6, 3, 4, 5}, 1);
  CHECK_THROWS_AS(predict(p, {}), Error);
  CHECK_THROWS_AS(predict(p, {1, 7}), Error);
  CHECK_THROWS_AS(predict(p, {1, 0, 2}), Error);
}

TEST_CASE("backward matches central finite differences") {
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto mp = testing::random_micro_problem(seed);
    const auto res = testing::check_gradients(mp.params, mp.batch, mp.targets);
    CAPTURE(seed);
    CAPTURE(res.worst_tensor);
    CHECK(res.max_rel_error < 1e-4);
    worst = std::max(worst, res.max_rel_error);
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("backward matches finite differences with dropout masks") {
  auto mp = testing::random_micro_problem(99);
  const auto shape = mp.params.shape();
  DropoutMasks<double> masks{Matrix<double>(mp.batch.size, shape.embedding_dim),
                             Matrix<double>(mp.batch.size, shape.hidden_size)};
  Rng rng(3);
  for (double& v : masks.input.values()) v = rng.bernoulli(0.3) ? 0.0 : 1.0 / 0.7;
  for (double& v : masks.recurrent.values()) v = rng.bernoulli(0.3) ? 0.0 : 1.0 / 0.7;
  const auto res = testing::check_gradients(mp.params, mp.batch, mp.targets, &masks);
  CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("backward at the clamp boundary is zero") {
  auto p = init_params<double>(NetworkShape{6, 3, 4, 5}, 3);
  const Vector<double> target{1, 0, 0, 1, 1};
  for (std::size_t j = 0; j < 5; ++j) p.b_out[j] = target[j] > 0 ? 40.0 : -40.0;
  ForwardCache<double> cache;
  forward(p, Batch::single({2, 4, 1}), cache);
  Matrix<double> targets(1, 5);
  std::copy(target.begin(), target.end(), targets.row_ptr(0));
  const auto g = backward(cache, targets, p);
  for (const auto& t : tensors(g))
    for (double v : t.values) CHECK(std::abs(v) < 1e-5);
}

TEST_CASE("scaling the loss scales every gradient exactly") {
  const auto mp = testing::random_micro_problem(17);
  ForwardCache<double> cache;
  forward(mp.params, mp.batch, cache);
  const auto g1 = backward(cache, mp.targets, mp.params);
  const auto g2 = backward(cache, mp.targets, mp.params, 2.0);
  const auto a = tensors(g1);
  const auto b = tensors(g2);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a[i].values.size(); ++k) CHECK(b[i].values[k] == 2.0 * a[i].values[k]);
}

TEST_CASE("backward rejects a mismatched cache") {
  const auto mp = testing::random_micro_problem(4);
  ForwardCache<double> cache;
  forward(mp.params, mp.batch, cache);
  const auto other = init_params<double>(NetworkShape{6, 3, 4, 5}, 8);
  if (!(other.shape() == mp.params.shape())) {
    CHECK_THROWS_AS(backward(cache, mp.targets, other), Error);
  }
  CHECK_THROWS_AS(backward(ForwardCache<double>{}, mp.targets, mp.params), Error);
}

TEST_CASE("adam update") {
  SUBCASE("zero gradient is a fixed point") {
    auto p = init_params<double>(NetworkShape{6, 3, 4, 5}, 1);
    const auto before = p;
    AdamState<double> state(p.shape(), AdamConfig{});
    adam_step(p, ModelParams<double>(p.shape()), state);
    CHECK(p == before);
    CHECK(state.step_count == 1);
  }
  SUBCASE("one scalar step") {
    std::vector<double> param{0.0}, grad{1.0}, m{0.0}, v{0.0};
    adam_update<double>(param, grad, m, v, 1, AdamConfig{0.001, 0.9, 0.99, 1e-8});
    CHECK(param[0] == doctest::Approx(-0.001 / (1.0 + 1e-8)).epsilon(1e-12));
  }
  SUBCASE("deterministic") {
    const auto mp = testing::random_micro_problem(5);
    ForwardCache<double> cache;
    forward(mp.params, mp.batch, cache);
    const auto g = backward(cache, mp.targets, mp.params);
    auto p1 = mp.params, p2 = mp.params;
    AdamState<double> s1(p1.shape(), {}), s2(p2.shape(), {});
    for (int i = 0; i < 3; ++i) {
      adam_step(p1, g, s1);
      adam_step(p2, g, s2);
    }
    CHECK(p1 == p2);
  }
  SUBCASE("non-finite gradient") {
    auto p = init_params<double>(NetworkShape{6, 3, 4, 5}, 1);
    const auto before = p;
    ModelParams<double> g(p.shape());
    g.b_out[2] = std::numeric_limits<double>::quiet_NaN();
    AdamState<double> state(p.shape(), {});
    try {
      adam_step(p, g, state);
      FAIL("expected divergence error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kTrainingDivergence);
    }
    CHECK(p == before);
    CHECK(state.step_count == 0);
  }
}

TEST_CASE("padding row stays zero and padding is neutral") {
  const auto p = init_params<float>(NetworkShape{10, 4, 6, 7}, 21);
  for (float v : p.embedding.row(0)) CHECK(v == 0.0f);
  const std::vector<std::int32_t> trace{3, 9, 1, 4};
  const auto base = predict(p, trace);
  for (int pad = 1; pad <= 8; ++pad) {
    auto padded = trace;
    padded.insert(padded.end(), static_cast<std::size_t>(pad), 0);
    CHECK(predict(p, padded) == base);
  }
}

TEST_CASE("batched forward reproduces single-trace predictions") {
  const auto p = init_params<float>(NetworkShape{10, 4, 6, 7}, 2);
  const std::vector<std::vector<std::int32_t>> seqs{{1, 2, 3}, {4}, {5, 6, 7, 8, 9}};
  ForwardCache<float> cache;
  forward(p, Batch::from_sequences(seqs), cache);
  for (std::size_t b = 0; b < seqs.size(); ++b) {
    const auto single = predict(p, seqs[b]);
    for (std::size_t j = 0; j < single.size(); ++j) CHECK(cache.preds(b, j) == single[j]);
  }
}
