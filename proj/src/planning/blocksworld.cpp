#include "grnet/planning/blocksworld.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "grnet/error.hpp"
#include "grnet/rng.hpp"

namespace grnet::planning {

std::string block_name(std::size_t index) {
  std::string suffix;
  std::size_t i = index + 1;
  while (i > 0) {
    --i;
    suffix.insert(suffix.begin(), static_cast<char>('A' + i % 26));
    i /= 26;
  }
  return "Block_" + suffix;
}

namespace {

std::vector<std::string> names_for(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(block_name(i));
  return names;
}

struct Grounding {
  std::vector<Fluent> fluents;
  std::vector<GroundedAction> actions;
};

Grounding ground(const std::vector<std::string>& names) {
  Grounding g;
  const Fluent arm_empty(bw::kArmEmpty, {});
  for (const auto& x : names) {
    g.fluents.emplace_back(bw::kOnTable, std::vector{x});
    g.fluents.emplace_back(bw::kClear, std::vector{x});
    const Fluent on_table(bw::kOnTable, {x}), clear(bw::kClear, {x}), holding(bw::kHolding, {x});
    g.actions.emplace_back(bw::kPickUp, std::vector{x}, FluentSet{clear, on_table, arm_empty}, FluentSet{holding},
                           FluentSet{clear, on_table, arm_empty});
    g.actions.emplace_back(bw::kPutDown, std::vector{x}, FluentSet{holding}, FluentSet{on_table, clear, arm_empty},
                           FluentSet{holding});
    for (const auto& y : names) {
      if (x == y) continue;
      g.fluents.emplace_back(bw::kOn, std::vector{x, y});
      const Fluent on(bw::kOn, {x, y}), clear_y(bw::kClear, {y});
      g.actions.emplace_back(bw::kStack, std::vector{x, y}, FluentSet{holding, clear_y},
                             FluentSet{on, clear, arm_empty}, FluentSet{holding, clear_y});
      g.actions.emplace_back(bw::kUnstack, std::vector{x, y}, FluentSet{on, clear, arm_empty},
                             FluentSet{holding, clear_y}, FluentSet{on, clear, arm_empty});
    }
  }
  return g;
}

}  // namespace

DomainVocabulary build_blocksworld_vocabulary(std::size_t n_blocks) {
  if (n_blocks == 0) throw Error(ErrorCode::kInvalidDomain, "Blocksworld needs at least one block");
  auto g = ground(names_for(n_blocks));
  return DomainVocabulary("blocksworld-" + std::to_string(n_blocks), std::move(g.fluents), std::move(g.actions));
}

std::size_t blocks_in_domain(const std::string& domain_id) {
  const std::string prefix = "blocksworld-";
  if (domain_id.rfind(prefix, 0) == 0 && domain_id.size() > prefix.size() && domain_id.size() <= prefix.size() + 6 &&
      std::all_of(domain_id.begin() + static_cast<std::ptrdiff_t>(prefix.size()), domain_id.end(),
                  [](char c) { return c >= '0' && c <= '9'; })) {
    const auto n = std::stoul(domain_id.substr(prefix.size()));
    if (n > 0) return n;
  }
  throw Error(ErrorCode::kInvalidDomain, "unknown domain '" + domain_id + "'");
}

std::optional<std::size_t> Towers::block_on(std::size_t y) const {
  for (std::size_t x = 0; x < support.size(); ++x)
    if (support[x] == y) return x;
  return std::nullopt;
}

Blocksworld::Blocksworld(std::size_t n_blocks) : names_(names_for(n_blocks)), vocab_(build_blocksworld_vocabulary(n_blocks)) {
  for (std::size_t i = 0; i < names_.size(); ++i) name_index_[names_[i]] = i;
  const std::size_t n = names_.size();
  pick_up_.assign(n, nullptr);
  put_down_.assign(n, nullptr);
  stack_.assign(n * n, nullptr);
  unstack_.assign(n * n, nullptr);
  for (const auto& a : vocab_.actions()) {
    const std::size_t x = name_index_.at(a.args[0]);
    if (a.name == bw::kPickUp) pick_up_[x] = &a;
    else if (a.name == bw::kPutDown) put_down_[x] = &a;
    else if (a.name == bw::kStack) stack_[x * n + name_index_.at(a.args[1])] = &a;
    else unstack_[x * n + name_index_.at(a.args[1])] = &a;
  }
}

std::size_t Blocksworld::block_index(const std::string& name) const {
  auto it = name_index_.find(name);
  if (it == name_index_.end()) throw Error(ErrorCode::kOutOfVocabulary, "unknown block " + name);
  return it->second;
}

Fluent Blocksworld::on(std::size_t x, std::size_t y) const { return Fluent(bw::kOn, {names_.at(x), names_.at(y)}); }
Fluent Blocksworld::on_table(std::size_t x) const { return Fluent(bw::kOnTable, {names_.at(x)}); }
Fluent Blocksworld::clear(std::size_t x) const { return Fluent(bw::kClear, {names_.at(x)}); }
Fluent Blocksworld::holding(std::size_t x) const { return Fluent(bw::kHolding, {names_.at(x)}); }
Fluent Blocksworld::arm_empty() const { return Fluent(bw::kArmEmpty, {}); }

const GroundedAction& Blocksworld::pick_up(std::size_t x) const { return *pick_up_.at(x); }
const GroundedAction& Blocksworld::put_down(std::size_t x) const { return *put_down_.at(x); }
const GroundedAction& Blocksworld::stack(std::size_t x, std::size_t y) const {
  if (x == y) throw Error(ErrorCode::kInvalidDomain, "a block cannot be stacked on itself");
  return *stack_.at(x * num_blocks() + y);
}
const GroundedAction& Blocksworld::unstack(std::size_t x, std::size_t y) const {
  if (x == y) throw Error(ErrorCode::kInvalidDomain, "a block cannot be unstacked from itself");
  return *unstack_.at(x * num_blocks() + y);
}

State Blocksworld::to_state(const Towers& towers) const {
  State s{arm_empty()};
  for (std::size_t x = 0; x < towers.size(); ++x) {
    if (towers.support[x]) s.insert(on(x, *towers.support[x]));
    else s.insert(on_table(x));
    if (towers.is_clear(x)) s.insert(clear(x));
  }
  return s;
}

bool Blocksworld::is_valid_state(const State& s, std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const std::size_t n = num_blocks();
  std::vector<int> supports(n, 0), covered(n, 0);
  std::vector<bool> clear_flag(n, false), held(n, false);
  std::vector<std::optional<std::size_t>> below(n);
  bool arm_empty_flag = false;
  for (const auto& f : s) {
    const auto& p = f.predicate();
    const auto& a = f.args();
    auto idx = [&](std::size_t k) {
      auto it = name_index_.find(a.at(k));
      if (it == name_index_.end()) throw Error(ErrorCode::kInvalidState, "unknown block in " + f.label());
      return it->second;
    };
    if (p == bw::kOn && a.size() == 2) {
      const auto x = idx(0), y = idx(1);
      ++supports[x];
      ++covered[y];
      below[x] = y;
    } else if (p == bw::kOnTable && a.size() == 1) {
      ++supports[idx(0)];
    } else if (p == bw::kClear && a.size() == 1) {
      clear_flag[idx(0)] = true;
    } else if (p == bw::kHolding && a.size() == 1) {
      const auto x = idx(0);
      held[x] = true;
      ++supports[x];
    } else if (p == bw::kArmEmpty && a.empty()) {
      arm_empty_flag = true;
    } else {
      return fail("unexpected fluent " + f.label());
    }
  }
  const auto n_held = std::count(held.begin(), held.end(), true);
  if (n_held > 1) return fail("more than one block held");
  if (arm_empty_flag != (n_held == 0)) return fail("Arm-Empty inconsistent with Holding");
  for (std::size_t x = 0; x < n; ++x) {
    if (supports[x] != 1) return fail(names_[x] + " does not have exactly one support");
    if (covered[x] > 1) return fail(names_[x] + " carries more than one block");
    if (held[x] && covered[x] > 0) return fail(names_[x] + " is held with a block on it");
    const bool should_be_clear = covered[x] == 0 && !held[x];
    if (clear_flag[x] != should_be_clear) return fail("Clear(" + names_[x] + ") inconsistent");
    // walk down; a chain longer than n means a cycle
    std::size_t steps = 0;
    for (auto cur = below[x]; cur; cur = below[*cur])
      if (++steps > n) return fail("support cycle through " + names_[x]);
  }
  return true;
}

Towers Blocksworld::to_towers(const State& s) const {
  std::string why;
  if (!is_valid_state(s, &why)) throw Error(ErrorCode::kInvalidState, why);
  if (!s.count(arm_empty())) throw Error(ErrorCode::kInvalidState, "state has a block in hand");
  Towers t;
  t.support.assign(num_blocks(), std::nullopt);
  for (const auto& f : s)
    if (f.predicate() == bw::kOn) t.support[name_index_.at(f.args()[0])] = name_index_.at(f.args()[1]);
  return t;
}

GoalTowers Blocksworld::decode_goal(const FluentSet& goal) const {
  const std::size_t n = num_blocks();
  GoalTowers g;
  g.kind.assign(n, GoalTowers::Kind::kUnconstrained);
  g.below.assign(n, 0);
  g.above.assign(n, std::nullopt);
  auto idx = [&](const std::string& name, const Fluent& f) {
    auto it = name_index_.find(name);
    if (it == name_index_.end()) throw Error(ErrorCode::kUnsatisfiableGoal, "unknown block in " + f.label());
    return it->second;
  };
  for (const auto& f : goal) {
    if (f.predicate() == bw::kOn && f.args().size() == 2) {
      const auto x = idx(f.args()[0], f), y = idx(f.args()[1], f);
      if (x == y) throw Error(ErrorCode::kUnsatisfiableGoal, f.label());
      if (g.kind[x] != GoalTowers::Kind::kUnconstrained)
        throw Error(ErrorCode::kUnsatisfiableGoal, names_[x] + " has two goal supports");
      if (g.above[y]) throw Error(ErrorCode::kUnsatisfiableGoal, names_[y] + " must carry two blocks");
      g.kind[x] = GoalTowers::Kind::kBlock;
      g.below[x] = y;
      g.above[y] = x;
    } else if (f.predicate() == bw::kOnTable && f.args().size() == 1) {
      const auto x = idx(f.args()[0], f);
      if (g.kind[x] != GoalTowers::Kind::kUnconstrained)
        throw Error(ErrorCode::kUnsatisfiableGoal, names_[x] + " has two goal supports");
      g.kind[x] = GoalTowers::Kind::kTable;
    } else {
      throw Error(ErrorCode::kUnsatisfiableGoal, "goals may only use On / On-Table, got " + f.label());
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t steps = 0;
    for (std::size_t cur = x; g.kind[cur] == GoalTowers::Kind::kBlock; cur = g.below[cur])
      if (++steps > n) throw Error(ErrorCode::kUnsatisfiableGoal, "cyclic goal through " + names_[x]);
  }
  return g;
}

bool Blocksworld::is_consistent_goal(const FluentSet& goal) const {
  try {
    decode_goal(goal);
    return true;
  } catch (const Error&) {
    return false;
  }
}

long double count_configurations(std::size_t n_blocks) {
  // a(m) = sum_s C(m-1, s-1) * s! * a(m-s): choose the stack holding the
  // lowest-numbered block, its other members and their order.
  std::vector<long double> a(n_blocks + 1, 0.0L);
  a[0] = 1.0L;
  for (std::size_t m = 1; m <= n_blocks; ++m) {
    long double binom = 1.0L;  // C(m-1, s-1)
    long double fact = 1.0L;   // s!
    for (std::size_t s = 1; s <= m; ++s) {
      fact *= static_cast<long double>(s);
      a[m] += binom * fact * a[m - s];
      binom = binom * static_cast<long double>(m - s) / static_cast<long double>(s);
    }
  }
  return a[n_blocks];
}

State Blocksworld::random_state(std::uint64_t seed) const {
  Rng rng(seed);
  const std::size_t n = num_blocks();
  std::vector<long double> counts(n + 1);
  for (std::size_t m = 0; m <= n; ++m) counts[m] = count_configurations(m);

  Towers towers;
  towers.support.assign(n, std::nullopt);
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  while (!remaining.empty()) {
    const std::size_t m = remaining.size();
    std::vector<long double> weights(m);
    long double binom = 1.0L, fact = 1.0L;
    for (std::size_t s = 1; s <= m; ++s) {
      fact *= static_cast<long double>(s);
      weights[s - 1] = binom * fact * counts[m - s];
      binom = binom * static_cast<long double>(m - s) / static_cast<long double>(s);
    }
    const std::size_t size = rng.weighted(weights) + 1;
    // lowest remaining block plus size-1 others, in uniformly random order
    std::vector<std::size_t> others(remaining.begin() + 1, remaining.end());
    rng.shuffle(others);
    std::vector<std::size_t> tower{remaining.front()};
    tower.insert(tower.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(size - 1));
    rng.shuffle(tower);
    for (std::size_t k = 1; k < tower.size(); ++k) towers.support[tower[k]] = tower[k - 1];
    std::erase_if(remaining, [&](std::size_t b) { return std::find(tower.begin(), tower.end(), b) != tower.end(); });
  }
  return to_state(towers);
}

State random_state(std::size_t n_blocks, std::uint64_t seed) { return Blocksworld(n_blocks).random_state(seed); }

std::vector<GroundedAction> Blocksworld::generate_plan(const State& init, const FluentSet& goal,
                                                       std::uint64_t seed) const {
  const GoalTowers g = decode_goal(goal);
  std::vector<GroundedAction> plan;
  State current = init;
  auto emit = [&](const GroundedAction& a) {
    current = apply_action(current, a);
    plan.push_back(a);
  };
  // A block left in hand is put down first.
  for (std::size_t x = 0; x < num_blocks(); ++x)
    if (current.count(holding(x))) emit(put_down(x));
  if (is_goal_satisfied(current, goal)) return plan;

  Rng rng(seed);
  const std::size_t n = num_blocks();
  Towers t = to_towers(current);

  // Placed: the block rests where the goal wants it (or anywhere, when the
  // goal is silent), its support is placed, and it does not occupy a spot the
  // goal reserves for another block.
  auto placed_flags = [&]() {
    std::vector<int> memo(n, -1);
    std::function<bool(std::size_t)> placed = [&](std::size_t x) -> bool {
      if (memo[x] >= 0) return memo[x] == 1;
      bool ok;
      const auto sup = t.support[x];
      switch (g.kind[x]) {
        case GoalTowers::Kind::kTable: ok = !sup.has_value(); break;
        case GoalTowers::Kind::kBlock: ok = sup == g.below[x]; break;
        default: ok = true;
      }
      if (ok && sup) ok = (!g.above[*sup] || *g.above[*sup] == x) && placed(*sup);
      memo[x] = ok ? 1 : 0;
      return ok;
    };
    std::vector<bool> out(n);
    for (std::size_t x = 0; x < n; ++x) out[x] = placed(x);
    return out;
  };

  // Phase 1: clear misplaced blocks down to the table.
  for (;;) {
    const auto placed = placed_flags();
    std::vector<std::size_t> movable;
    for (std::size_t x = 0; x < n; ++x)
      if (!placed[x] && t.support[x] && t.is_clear(x)) movable.push_back(x);
    if (movable.empty()) break;
    const std::size_t x = movable[rng.below(movable.size())];
    emit(unstack(x, *t.support[x]));
    emit(put_down(x));
    t.support[x] = std::nullopt;
  }

  // Phase 2: stack goal blocks onto placed, clear supports.
  for (;;) {
    const auto placed = placed_flags();
    std::vector<std::size_t> ready;
    for (std::size_t x = 0; x < n; ++x) {
      if (g.kind[x] != GoalTowers::Kind::kBlock || placed[x]) continue;
      const std::size_t y = g.below[x];
      if (!t.support[x] && t.is_clear(x) && placed[y] && t.is_clear(y)) ready.push_back(x);
    }
    if (ready.empty()) break;
    const std::size_t x = ready[rng.below(ready.size())];
    emit(pick_up(x));
    emit(stack(x, g.below[x]));
    t.support[x] = g.below[x];
  }

  if (!is_goal_satisfied(current, goal))
    throw Error(ErrorCode::kInvalidState, "plan generation ended without reaching " + to_string(goal));
  return plan;
}

}  // namespace grnet::planning
