#pragma once

#include <set>
#include <string>
#include <vector>

namespace grnet::planning {

// Grounded proposition, e.g. (On Block_C Block_B). Ordered by its label.
class Fluent {
 public:
  Fluent() = default;
  Fluent(std::string predicate, std::vector<std::string> args);

  // Parses "(Pred arg1 arg2)".
  static Fluent parse(const std::string& label);

  const std::string& predicate() const noexcept { return predicate_; }
  const std::vector<std::string>& args() const noexcept { return args_; }
  const std::string& label() const noexcept { return label_; }

  auto operator<=>(const Fluent& other) const { return label_ <=> other.label_; }
  bool operator==(const Fluent& other) const { return label_ == other.label_; }

 private:
  std::string predicate_;
  std::vector<std::string> args_;
  std::string label_;
};

using FluentSet = std::set<Fluent>;
using State = FluentSet;

std::string make_label(const std::string& name, const std::vector<std::string>& args);

struct GroundedAction {
  std::string name;
  std::vector<std::string> args;
  std::string label;
  FluentSet preconditions;
  FluentSet add_effects;
  FluentSet del_effects;

  GroundedAction() = default;
  GroundedAction(std::string name, std::vector<std::string> args, FluentSet pre, FluentSet add, FluentSet del);
};

// STRIPS progression: (s \ del) U add. Throws kInapplicableAction when a
// precondition is missing.
State apply_action(const State& s, const GroundedAction& a);

bool is_applicable(const State& s, const GroundedAction& a);

// g is a subset of s.
bool is_goal_satisfied(const State& s, const FluentSet& g);

// "{(On A B), (On B C)}" style rendering for messages.
std::string to_string(const FluentSet& s);

}  // namespace grnet::planning
