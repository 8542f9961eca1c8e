#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "grnet/dataset/dataset.hpp"
#include "grnet/dataset/generate.hpp"
#include "grnet/dataset/io.hpp"
#include "grnet/error.hpp"
#include "grnet/rng.hpp"

using namespace grnet;
using namespace grnet::dataset;
using planning::Blocksworld;

namespace {

Fluent atom(const std::string& name) { return Fluent(name, {}); }

FluentSet atoms(std::initializer_list<const char*> names) {
  FluentSet s;
  for (auto n : names) s.insert(atom(n));
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: nothing thrown
}

bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& seq) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i)
    if (seq[i] == sub[j]) ++j;
  return j == sub.size();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("grnet_dataset_test_" + name);
}

}  // namespace

TEST_CASE("sample_observations") {
  std::vector<std::string> plan;
  for (int i = 0; i < 20; ++i) plan.push_back("(a" + std::to_string(i) + ")");

  SUBCASE("full observability returns the plan") {
    CHECK(sample_observations(plan, 1.0, 3).labels == plan);
  }
  SUBCASE("half of ten actions, in order") {
    const std::vector<std::string> ten(plan.begin(), plan.begin() + 10);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto t = sample_observations(ten, 0.5, seed);
      REQUIRE(t.labels.size() == 5);
      CHECK(is_subsequence(t.labels, ten));
      CHECK(t.source_plan_len == 10);
      CHECK(t.observability == 0.5);
    }
  }
  SUBCASE("selection frequencies are uniform") {
    std::vector<int> hits(plan.size(), 0);
    const int trials = 20000;
    for (int seed = 0; seed < trials; ++seed) {
      const auto t = sample_observations(plan, 0.3, static_cast<std::uint64_t>(seed));
      REQUIRE(t.labels.size() == 6);
      for (const auto& l : t.labels) ++hits[static_cast<std::size_t>(std::stoi(l.substr(2)))];
    }
    for (int h : hits) CHECK(std::abs(h / double(trials) - 0.3) < 0.02);
  }
  SUBCASE("count rounds with a floor of one") {
    CHECK(observation_count(3, 0.3) == 1);
    CHECK(observation_count(1, 0.3) == 1);
    CHECK(observation_count(5, 0.5) == 3);
    CHECK(observation_count(20, 0.7) == 14);
  }
  SUBCASE("deterministic and rejects bad input") {
    CHECK(sample_observations(plan, 0.5, 9) == sample_observations(plan, 0.5, 9));
    CHECK(code_of([] { sample_observations(std::vector<std::string>{}, 0.5, 1); }) == ErrorCode::kEmptyInput);
    CHECK(code_of([&] { sample_observations(plan, 0.0, 1); }) == ErrorCode::kInvalidConfig);
  }
}

TEST_CASE("make_training_pair") {
  const Blocksworld bw(5);
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const State init = bw.random_state(rng.next());
    const FluentSet goal = random_goal(bw, init, 3, rng.next());
    const std::uint64_t seed = rng.next();
    const auto pair = make_training_pair(bw, init, goal, 0.5, seed);
    CHECK(pair.hidden_goal == goal);
    CHECK_FALSE(pair.trace.labels.empty());
    const auto plan = bw.generate_plan(init, goal, derive_seed(seed, 1));
    std::vector<std::string> labels;
    State s = init;
    for (const auto& a : plan) {
      labels.push_back(a.label);
      s = planning::apply_action(s, a);
    }
    CHECK(planning::is_goal_satisfied(s, goal));
    CHECK(is_subsequence(pair.trace.labels, labels));
    CHECK(pair == make_training_pair(bw, init, goal, 0.5, seed));
  }

  SUBCASE("already satisfied goal resamples the initial state") {
    const State init = bw.random_state(3);
    FluentSet goal;
    for (const auto& f : init)
      if (f.predicate() == planning::bw::kOnTable) goal.insert(f);
    const auto pair = make_training_pair(bw, init, goal, 1.0, 4);
    CHECK_FALSE(pair.trace.labels.empty());
    CHECK(pair.hidden_goal == goal);
  }
  SUBCASE("unsatisfiable goal propagates") {
    const State init = bw.random_state(3);
    CHECK(code_of([&] { make_training_pair(bw, init, {bw.on(0, 1), bw.on(1, 0)}, 0.5, 1); }) ==
          ErrorCode::kUnsatisfiableGoal);
  }
}

TEST_CASE("recognizability on the worked examples") {
  const auto g1 = atoms({"a", "b", "c"});
  const std::vector<FluentSet> high{g1, atoms({"a", "e", "f"}), atoms({"g", "h", "i"})};
  CHECK(recognizability(g1, high) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(std::abs(normalized_recognizability(g1, high) - 0.75) < 1e-12);

  const std::vector<FluentSet> low{g1, atoms({"a", "b", "x"}), atoms({"a", "b", "y"})};
  CHECK(std::abs(recognizability(g1, low) - 5.0 / 3.0) < 1e-12);
  CHECK(std::abs(normalized_recognizability(g1, low) - 1.0 / 3.0) < 1e-12);

  CHECK(recognizability(g1, {g1}) == 3.0);
  const std::vector<FluentSet> shared{g1, atoms({"a", "b", "c", "d"}), atoms({"a", "b", "c", "e"})};
  CHECK(recognizability(g1, shared) == doctest::Approx(1.0));
  CHECK(normalized_recognizability(g1, shared) == 0.0);

  CHECK(code_of([&] { recognizability(atoms({"z"}), high); }) == ErrorCode::kInvalidInstance);
  CHECK(code_of([&] { normalized_recognizability(g1, {g1}); }) == ErrorCode::kDegenerateNormalization);
}

TEST_CASE("difficulty buckets") {
  CHECK(difficulty_bucket(0.75) == 7);
  CHECK(difficulty_bucket(0.33) == 3);
  CHECK(difficulty_bucket(1.0 / 3.0) == 3);
  CHECK(difficulty_bucket(0.3) == 3);
  CHECK(difficulty_bucket(0.05) == 1);
  CHECK(difficulty_bucket(0.0) == 1);
  CHECK(difficulty_bucket(0.95) == 9);
  CHECK(difficulty_bucket(1.0) == 9);
  CHECK(bucket_instances({}).empty());
}

TEST_CASE("generate_goal_set") {
  const Blocksworld bw(7);
  const State init = bw.random_state(1);
  SUBCASE("zero overlap gives full recognizability") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto hidden = random_goal(bw, init, 3, seed);
      const auto draw = generate_goal_set(bw, hidden, 2, 0.0, seed);
      REQUIRE(draw.goals.size() == 2);
      CHECK(draw.goals[draw.hidden_index] == hidden);
      CHECK(normalized_recognizability(hidden, draw.goals) == 1.0);
    }
  }
  SUBCASE("invariants over many draws") {
    Rng rng(5);
    int hidden_first = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const auto size = static_cast<std::size_t>(rng.between(2, 4));
      const auto hidden = random_goal(bw, init, size, rng.next());
      const auto m = static_cast<std::size_t>(rng.between(2, 10));
      const auto draw = generate_goal_set(bw, hidden, m, rng.uniform(), rng.next());
      REQUIRE(draw.goals.size() == m);
      CHECK(std::count(draw.goals.begin(), draw.goals.end(), hidden) == 1);
      CHECK(draw.goals[draw.hidden_index] == hidden);
      hidden_first += draw.hidden_index == 0;
      for (std::size_t i = 0; i < m; ++i) {
        CHECK(bw.is_consistent_goal(draw.goals[i]));
        CHECK(draw.goals[i].size() + 1 >= size);
        CHECK(draw.goals[i].size() <= size + 1);
        if (i != draw.hidden_index) {
          std::size_t shared = 0;
          for (const auto& f : draw.goals[i]) shared += hidden.count(f);
          CHECK(shared < size);
        }
        for (std::size_t j = i + 1; j < m; ++j) CHECK(draw.goals[i] != draw.goals[j]);
      }
      const double r = recognizability(hidden, draw.goals);
      CHECK(r >= double(size) / double(m) - 1e-12);
      CHECK(r <= double(size) + 1e-12);
    }
    CHECK(hidden_first < 150);  // the hidden goal is not parked at index 0
  }
  SUBCASE("overlap steers recognizability") {
    double low = 0, high = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto hidden = random_goal(bw, init, 4, seed);
      low += normalized_recognizability(hidden, generate_goal_set(bw, hidden, 8, 0.9, seed).goals);
      high += normalized_recognizability(hidden, generate_goal_set(bw, hidden, 8, 0.1, seed).goals);
    }
    CHECK(low < high);
  }
  SUBCASE("errors") {
    const auto hidden = random_goal(bw, init, 2, 1);
    CHECK(code_of([&] { generate_goal_set(bw, hidden, 1, 0.5, 1); }) == ErrorCode::kInvalidConfig);
    const Blocksworld tiny(2);
    CHECK(code_of([&] { generate_goal_set(tiny, {tiny.on(0, 1)}, 20, 0.0, 1); }) == ErrorCode::kGenerationFailure);
  }
}

TEST_CASE("generated test instances satisfy the instance invariants") {
  const Blocksworld bw(7);
  TestSetConfig cfg;
  cfg.num_goal_sets = 40;
  const auto instances = generate_test_instances(bw, cfg);
  CHECK(instances.size() >= 40 * 3);
  for (const auto& inst : instances) {
    CHECK_NOTHROW(inst.validate());
    CHECK(inst.goal_set.size() >= 5);
    CHECK(inst.goal_set.size() <= 10);
    const auto rep = recognizability_report(inst);
    const double m = static_cast<double>(inst.goal_set.size());
    const double g = static_cast<double>(inst.hidden_goal().size());
    CHECK(rep.raw >= g / m - 1e-12);
    CHECK(rep.raw <= g + 1e-12);
    CHECK(rep.normalized >= 0.0);
    CHECK(rep.normalized <= 1.0);
  }
  CHECK(instances == generate_test_instances(bw, cfg));
}

TEST_CASE("bucketed instance generation fills every class") {
  const Blocksworld bw(7);
  TestSetConfig cfg;
  const auto instances = generate_bucket_instances(bw, cfg, 10, 0.3);
  const auto buckets = bucket_instances(instances);
  REQUIRE(buckets.size() == 9);
  for (const auto& [b, list] : buckets) {
    CHECK(list.size() == 10);
    for (const auto& inst : list) {
      const double rz = recognizability_report(inst).normalized;
      if (b > 1) CHECK(rz >= 0.1 * b - 1e-9);
      if (b < 9) CHECK(rz < 0.1 * (b + 1));
    }
  }
}

TEST_CASE("dataset files") {
  const Blocksworld bw(7);
  const auto& vocab = bw.vocabulary();

  SUBCASE("round trip of 1000 pairs") {
    TrainingSetConfig cfg;
    cfg.num_pairs = 1000;
    const auto pairs = generate_training_pairs(bw, cfg);
    const auto path = temp_path("pairs.jsonl");
    write_dataset(path, pairs, vocab);
    CHECK(read_training_pairs(path, vocab) == pairs);
    CHECK(peek_domain(path) == "blocksworld-7");
    std::filesystem::remove(path);
  }
  SUBCASE("round trip of instances") {
    TestSetConfig cfg;
    cfg.num_goal_sets = 20;
    const auto instances = generate_test_instances(bw, cfg);
    std::stringstream buf;
    for (const auto& i : instances) buf << encode_record(i, vocab) << "\n";
    CHECK(read_dataset(buf, vocab) == instances);
  }
  SUBCASE("empty input is an empty dataset") {
    std::istringstream in("");
    CHECK(read_dataset(in, vocab).empty());
  }
  SUBCASE("unknown action label is a parse error with its line number") {
    TrainingSetConfig cfg;
    cfg.num_pairs = 3;
    const auto pairs = generate_training_pairs(bw, cfg);
    std::string bad = encode_record(as_instance(pairs[2]), vocab);
    const auto pos = bad.find("Block_");
    bad.replace(pos, 7, "Block_Q");
    std::stringstream buf;
    buf << encode_record(as_instance(pairs[0]), vocab) << "\n"
        << encode_record(as_instance(pairs[1]), vocab) << "\n"
        << bad << "\n";
    try {
      read_dataset(buf, vocab);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  SUBCASE("foreign vocabulary is incompatible") {
    const Blocksworld other(6);
    TrainingSetConfig cfg;
    cfg.n_blocks = 6;
    cfg.num_pairs = 1;
    const auto pairs = generate_training_pairs(other, cfg);
    std::stringstream buf;
    buf << encode_record(as_instance(pairs[0]), other.vocabulary()) << "\n";
    CHECK(code_of([&] { read_dataset(buf, vocab); }) == ErrorCode::kIncompatible);
  }
  SUBCASE("malformed records") {
    std::istringstream garbage("{not json\n");
    CHECK(code_of([&] { read_dataset(garbage, vocab); }) == ErrorCode::kParse);
    std::istringstream missing("{\"version\":1}\n");
    CHECK(code_of([&] { read_dataset(missing, vocab); }) == ErrorCode::kParse);
  }
}
