#include "doctest.h"
#include "grnet/dataset/generate.hpp"
#include "grnet/error.hpp"
#include "grnet/recognizer/recognizer.hpp"
#include "grnet/rng.hpp"

using namespace grnet;
using namespace grnet::recognizer;
using planning::Fluent;
using planning::FluentSet;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: nothing thrown
}

FluentSet goal(std::initializer_list<const char*> labels) {
  FluentSet g;
  for (auto l : labels) g.insert(Fluent::parse(l));
  return g;
}

std::span<const double> view(const std::vector<double>& v) { return v; }

std::size_t brute_force_argmax(const std::vector<FluentSet>& goals, const std::vector<double>& preds,
                               const planning::DomainVocabulary& vocab) {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    double s = 0.0;
    for (const auto& f : goals[i]) s += preds[*vocab.find_fluent(f.label())];
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("running example scores") {
  const auto vocab = planning::build_blocksworld_vocabulary(22);
  std::vector<double> preds(vocab.num_fluents(), 0.0);
  preds[vocab.fluent_position("(On Block_C Block_B)")] = 1.000;
  preds[vocab.fluent_position("(On Block_F Block_C)")] = 0.017;
  preds[vocab.fluent_position("(On Block_G Block_H)")] = 0.000;
  preds[vocab.fluent_position("(On Block_H Block_F)")] = 0.003;
  const auto g1 = goal({"(On Block_C Block_B)", "(On Block_F Block_C)"});
  const auto g2 = goal({"(On Block_G Block_H)", "(On Block_H Block_F)"});
  CHECK(std::abs(score_goal(g1, view(preds), vocab) - 1.017) < 1e-12);
  CHECK(std::abs(score_goal(g2, view(preds), vocab) - 0.003) < 1e-12);
  const auto r = select_goal({g1, g2}, view(preds), vocab);
  CHECK(r.selected_index == 0);
  CHECK(r.scores.size() == 2);
  CHECK(select_goal({g2, g1}, view(preds), vocab).selected_index == 1);
  CHECK(score_goal(g1, view(preds), vocab, ScoreMode::kMean) == doctest::Approx(0.5085));
}

TEST_CASE("score and selection basics") {
  const auto vocab = planning::build_blocksworld_vocabulary(5);
  const std::vector<double> half(vocab.num_fluents(), 0.5);
  const auto g4 = goal({"(On Block_A Block_B)", "(On Block_B Block_C)", "(Clear Block_A)", "(On-Table Block_C)"});
  CHECK(score_goal({}, view(half), vocab) == 0.0);
  CHECK(score_goal(g4, view(half), vocab) == 2.0);
  CHECK(code_of([&] { score_goal(goal({"(On Block_A Block_Z)"}), view(half), vocab); }) ==
        ErrorCode::kOutOfVocabulary);
  CHECK(code_of([&] { score_goal(g4, view(std::vector<double>(3, 0.5)), vocab); }) == ErrorCode::kInvalidShape);
  CHECK(code_of([&] { select_goal({}, view(half), vocab); }) == ErrorCode::kEmptyInput);

  Rng rng(1);
  std::vector<double> random(vocab.num_fluents());
  for (auto& v : random) v = rng.uniform();
  CHECK(select_goal({g4}, view(random), vocab).selected_index == 0);
  CHECK(select_goal({g4, g4}, view(random), vocab).selected_index == 0);
  const auto g1 = goal({"(On Block_A Block_B)"});
  const auto g2 = goal({"(On Block_B Block_C)"});
  std::vector<double> tied(vocab.num_fluents(), 0.0);
  tied[vocab.fluent_position("(On Block_A Block_B)")] = 0.25;
  tied[vocab.fluent_position("(On Block_B Block_C)")] = 0.25;
  CHECK(select_goal({g2, g1}, view(tied), vocab).selected_index == 0);
}

TEST_CASE("selection properties against an exhaustive oracle") {
  const planning::Blocksworld bw(6);
  const auto& vocab = bw.vocabulary();
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const auto init = bw.random_state(rng.next());
    const auto hidden = dataset::random_goal(bw, init, 1 + rng.below(4), rng.next());
    const auto draw = dataset::generate_goal_set(bw, hidden, 2 + rng.below(8), rng.uniform(), rng.next());
    std::vector<double> preds(vocab.num_fluents());
    for (auto& v : preds) v = rng.uniform();
    const auto r = select_goal(draw.goals, view(preds), vocab);
    CHECK(r.selected_index == brute_force_argmax(draw.goals, preds, vocab));
    for (double s : r.scores) CHECK(s <= r.scores[r.selected_index]);

    // positive scaling
    auto scaled = preds;
    for (auto& v : scaled) v *= 0.5;
    CHECK(select_goal(draw.goals, view(scaled), vocab).selected_index == r.selected_index);

    // inserting a copy of a non-selected goal
    const std::size_t other = (r.selected_index + 1) % draw.goals.size();
    auto extended = draw.goals;
    extended.insert(extended.begin() + static_cast<std::ptrdiff_t>(rng.below(extended.size() + 1)),
                    draw.goals[other]);
    const auto re = select_goal(extended, view(preds), vocab);
    if (other != r.selected_index) CHECK(extended[re.selected_index] == draw.goals[r.selected_index]);

    // monotone in each term
    const auto& g = draw.goals[other];
    const double before = score_goal(g, view(preds), vocab);
    auto raised = preds;
    raised[vocab.fluent_position(g.begin()->label())] += 0.3;
    CHECK(score_goal(g, view(raised), vocab) >= before);

    // additivity on disjoint goals
    FluentSet a, b;
    for (const auto& f : vocab.fluents()) (rng.bernoulli(0.5) ? a : b).insert(f);
    CHECK(score_goal(a, view(preds), vocab) + score_goal(b, view(preds), vocab) ==
          doctest::Approx(score_goal(FluentSet(vocab.fluents().begin(), vocab.fluents().end()), view(preds), vocab)));
  }
}

TEST_CASE("recognize runs the full pipeline") {
  const planning::Blocksworld bw(5);
  const auto& vocab = bw.vocabulary();
  model::ModelConfig cfg;
  cfg.embedding_dim = 6;
  cfg.hidden_size = 8;
  const auto params = nn::init_params<float>(model::network_shape(cfg, vocab), 5);
  dataset::TestSetConfig tc;
  tc.n_blocks = 5;
  tc.num_goal_sets = 20;
  for (const auto& inst : dataset::generate_test_instances(bw, tc)) {
    const auto r = recognize(inst, params, vocab);
    const auto preds = model::forward(params, model::encode_trace(inst.trace, vocab));
    const std::vector<double> wide(preds.begin(), preds.end());
    CHECK(r.selected_index == brute_force_argmax(inst.goal_set, wide, vocab));
    CHECK(r.prediction == wide);
    CHECK(r.scores.size() == inst.goal_set.size());
    CHECK(r.latency > 0.0);
  }
  dataset::GRInstance empty;
  empty.goal_set = {goal({"(On Block_A Block_B)"})};
  CHECK(code_of([&] { recognize(empty, params, vocab); }) == ErrorCode::kEmptyInput);
}
