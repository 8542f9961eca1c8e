#include "grnet/dataset/generate.hpp"

#include <algorithm>
#include <array>

#include "grnet/error.hpp"
#include "grnet/rng.hpp"

namespace grnet::dataset {

using planning::Blocksworld;

namespace {

void check_ranges(std::size_t lo, std::size_t hi, const char* what) {
  if (lo == 0 || lo > hi) throw Error(ErrorCode::kInvalidConfig, std::string("bad range for ") + what);
}

}  // namespace

std::vector<TrainingPair> generate_training_pairs(const Blocksworld& bw, const TrainingSetConfig& cfg) {
  check_ranges(cfg.min_goal_size, cfg.max_goal_size, "goal size");
  if (cfg.plans_per_problem == 0) throw Error(ErrorCode::kInvalidConfig, "plans_per_problem must be positive");
  if (!(cfg.min_observability > 0 && cfg.min_observability <= cfg.max_observability && cfg.max_observability <= 1))
    throw Error(ErrorCode::kInvalidConfig, "bad observability range");

  std::vector<TrainingPair> pairs;
  pairs.reserve(cfg.num_pairs);
  for (std::uint64_t problem = 0; pairs.size() < cfg.num_pairs; ++problem) {
    const std::uint64_t pseed = derive_seed(cfg.seed, problem);
    Rng rng(pseed);
    const State init = bw.random_state(rng.next());
    const auto size = static_cast<std::size_t>(
        rng.between(static_cast<std::int64_t>(cfg.min_goal_size), static_cast<std::int64_t>(cfg.max_goal_size)));
    const FluentSet goal = random_goal(bw, init, size, rng.next());
    for (std::size_t j = 0; j < cfg.plans_per_problem && pairs.size() < cfg.num_pairs; ++j) {
      const double obs = rng.uniform(cfg.min_observability, cfg.max_observability);
      pairs.push_back(make_training_pair(bw, init, goal, obs, rng.next()));
    }
  }
  return pairs;
}

namespace {

struct GoalSetProblem {
  State init;
  GoalSetDraw draw;
};

GoalSetProblem draw_problem(const Blocksworld& bw, const TestSetConfig& cfg, Rng& rng) {
  GoalSetProblem p;
  p.init = bw.random_state(rng.next());
  const auto m = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(cfg.min_goal_set_size),
                                                      static_cast<std::int64_t>(cfg.max_goal_set_size)));
  const auto size = static_cast<std::size_t>(
      rng.between(static_cast<std::int64_t>(cfg.min_goal_size), static_cast<std::int64_t>(cfg.max_goal_size)));
  const FluentSet hidden = random_goal(bw, p.init, size, rng.next());
  const double overlap = rng.uniform(cfg.min_overlap, cfg.max_overlap);
  p.draw = generate_goal_set(bw, hidden, m, overlap, rng.next());
  return p;
}

void validate(const TestSetConfig& cfg) {
  check_ranges(cfg.min_goal_size, cfg.max_goal_size, "goal size");
  check_ranges(cfg.min_goal_set_size, cfg.max_goal_set_size, "goal set size");
  if (cfg.min_goal_set_size < 2) throw Error(ErrorCode::kInvalidConfig, "goal sets need at least two goals");
  if (cfg.observabilities.empty()) throw Error(ErrorCode::kInvalidConfig, "no observability levels");
  if (cfg.hidden_per_set == 0) throw Error(ErrorCode::kInvalidConfig, "hidden_per_set must be positive");
}

}  // namespace

std::vector<GRInstance> generate_test_instances(const Blocksworld& bw, const TestSetConfig& cfg) {
  validate(cfg);
  std::vector<GRInstance> out;
  for (std::uint64_t s = 0; s < cfg.num_goal_sets; ++s) {
    Rng rng(derive_seed(cfg.seed, s));
    const auto problem = draw_problem(bw, cfg, rng);
    std::vector<std::size_t> hidden{problem.draw.hidden_index};
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < problem.draw.goals.size(); ++i)
      if (i != problem.draw.hidden_index && !planning::is_goal_satisfied(problem.init, problem.draw.goals[i]))
        others.push_back(i);
    rng.shuffle(others);
    for (std::size_t i = 0; i < others.size() && hidden.size() < cfg.hidden_per_set; ++i) hidden.push_back(others[i]);

    for (auto h : hidden) {
      const auto plan = bw.generate_plan(problem.init, problem.draw.goals[h], rng.next());
      for (double obs : cfg.observabilities) {
        GRInstance inst;
        inst.seed = rng.next();
        inst.trace = sample_observations(plan, obs, inst.seed);
        inst.goal_set = problem.draw.goals;
        inst.hidden_index = h;
        out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

std::vector<GRInstance> generate_bucket_instances(const Blocksworld& bw, const TestSetConfig& cfg,
                                                  std::size_t per_bucket, double observability) {
  validate(cfg);
  std::array<std::size_t, 10> filled{};
  std::vector<GRInstance> out;
  const std::uint64_t max_attempts = 2000 * per_bucket * 9 + 1000;
  for (std::uint64_t attempt = 0; out.size() < 9 * per_bucket; ++attempt) {
    if (attempt == max_attempts) {
      std::string counts;
      for (int b = 1; b <= 9; ++b) counts += " C" + std::to_string(b) + "=" + std::to_string(filled[static_cast<std::size_t>(b)]);
      throw Error(ErrorCode::kGenerationFailure, "could not fill every difficulty class:" + counts);
    }
    Rng rng(derive_seed(cfg.seed, attempt));
    const auto problem = draw_problem(bw, cfg, rng);
    const auto& hidden = problem.draw.goals[problem.draw.hidden_index];
    const int bucket = difficulty_bucket(normalized_recognizability(hidden, problem.draw.goals));
    if (filled[static_cast<std::size_t>(bucket)] >= per_bucket) continue;
    const auto plan = bw.generate_plan(problem.init, hidden, rng.next());
    GRInstance inst;
    inst.seed = rng.next();
    inst.trace = sample_observations(plan, observability, inst.seed);
    inst.goal_set = problem.draw.goals;
    inst.hidden_index = problem.draw.hidden_index;
    out.push_back(std::move(inst));
    ++filled[static_cast<std::size_t>(bucket)];
  }
  return out;
}

}  // namespace grnet::dataset
