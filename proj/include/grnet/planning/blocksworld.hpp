#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grnet/planning/fluent.hpp"
#include "grnet/planning/vocabulary.hpp"

namespace grnet::planning {

namespace bw {
inline const std::string kOn = "On";
inline const std::string kOnTable = "On-Table";
inline const std::string kClear = "Clear";
inline const std::string kHolding = "Holding";
inline const std::string kArmEmpty = "Arm-Empty";
inline const std::string kPickUp = "Pick-Up";
inline const std::string kPutDown = "Put-Down";
inline const std::string kStack = "Stack";
inline const std::string kUnstack = "Unstack";
}  // namespace bw

// Block names: Block_A .. Block_Z, then Block_AA, Block_AB, ...
std::string block_name(std::size_t index);

// Network-facing vocabulary: On / On-Table / Clear fluents (Holding and
// Arm-Empty stay simulator-internal) and all Pick-Up / Put-Down / Stack /
// Unstack actions.
DomainVocabulary build_blocksworld_vocabulary(std::size_t n_blocks);

// Block count encoded in a "blocksworld-<n>" domain id. Throws kInvalidDomain.
std::size_t blocks_in_domain(const std::string& domain_id);

// Block-indexed view of an arm-empty state: support[x] is the block under x,
// or nullopt when x is on the table.
struct Towers {
  std::vector<std::optional<std::size_t>> support;

  std::size_t size() const noexcept { return support.size(); }
  std::optional<std::size_t> block_on(std::size_t y) const;
  bool is_clear(std::size_t x) const { return !block_on(x).has_value(); }
};

// Goal restricted to On / On-Table fluents, decoded per block.
struct GoalTowers {
  enum class Kind { kUnconstrained, kTable, kBlock };
  std::vector<Kind> kind;
  std::vector<std::size_t> below;                  // valid when kind == kBlock
  std::vector<std::optional<std::size_t>> above;  // goal block on top of x
};

class Blocksworld {
 public:
  explicit Blocksworld(std::size_t n_blocks);

  std::size_t num_blocks() const noexcept { return names_.size(); }
  const DomainVocabulary& vocabulary() const noexcept { return vocab_; }
  const std::vector<std::string>& block_names() const noexcept { return names_; }
  std::size_t block_index(const std::string& name) const;

  Fluent on(std::size_t x, std::size_t y) const;
  Fluent on_table(std::size_t x) const;
  Fluent clear(std::size_t x) const;
  Fluent holding(std::size_t x) const;
  Fluent arm_empty() const;

  const GroundedAction& pick_up(std::size_t x) const;
  const GroundedAction& put_down(std::size_t x) const;
  const GroundedAction& stack(std::size_t x, std::size_t y) const;
  const GroundedAction& unstack(std::size_t x, std::size_t y) const;

  State to_state(const Towers& towers) const;
  // Requires a valid arm-empty state.
  Towers to_towers(const State& s) const;

  // Physical consistency: every block on exactly one support or held, Clear
  // exactly for uncovered unheld blocks, at most one block held, Arm-Empty iff
  // nothing held, no support cycles.
  bool is_valid_state(const State& s, std::string* why = nullptr) const;

  // Decodes a goal or throws kUnsatisfiableGoal (non On/On-Table fluent,
  // two supports, two blocks on one block, cycles, unknown blocks).
  GoalTowers decode_goal(const FluentSet& goal) const;
  bool is_consistent_goal(const FluentSet& goal) const;

  // Uniformly sampled arm-empty configuration (all towers equally likely).
  State random_state(std::uint64_t seed) const;

  // Unstacks misplaced blocks to the table, then builds the goal towers
  // bottom-up. The seed randomizes the order among independent moves.
  std::vector<GroundedAction> generate_plan(const State& init, const FluentSet& goal, std::uint64_t seed) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> name_index_;
  DomainVocabulary vocab_;
  std::vector<const GroundedAction*> pick_up_, put_down_, stack_, unstack_;  // stack_/unstack_ are n x n
};

// Number of distinct arm-empty configurations of n labeled blocks.
long double count_configurations(std::size_t n_blocks);

State random_state(std::size_t n_blocks, std::uint64_t seed);

}  // namespace grnet::planning
