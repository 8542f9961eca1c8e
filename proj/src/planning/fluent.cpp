#include "grnet/planning/fluent.hpp"

#include <algorithm>
#include <sstream>

#include "grnet/error.hpp"

namespace grnet::planning {

std::string make_label(const std::string& name, const std::vector<std::string>& args) {
  std::string out = "(" + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

Fluent::Fluent(std::string predicate, std::vector<std::string> args)
    : predicate_(std::move(predicate)), args_(std::move(args)), label_(make_label(predicate_, args_)) {}

Fluent Fluent::parse(const std::string& label) {
  if (label.size() < 3 || label.front() != '(' || label.back() != ')')
    throw Error(ErrorCode::kParse, "malformed fluent label '" + label + "'");
  std::istringstream in(label.substr(1, label.size() - 2));
  std::string predicate;
  std::vector<std::string> args;
  in >> predicate;
  for (std::string a; in >> a;) args.push_back(a);
  if (predicate.empty()) throw Error(ErrorCode::kParse, "fluent label without predicate '" + label + "'");
  Fluent f(predicate, args);
  if (f.label() != label) throw Error(ErrorCode::kParse, "non-canonical fluent label '" + label + "'");
  return f;
}

GroundedAction::GroundedAction(std::string name_, std::vector<std::string> args_, FluentSet pre, FluentSet add,
                               FluentSet del)
    : name(std::move(name_)),
      args(std::move(args_)),
      label(make_label(name, args)),
      preconditions(std::move(pre)),
      add_effects(std::move(add)),
      del_effects(std::move(del)) {
  for (const auto& f : add_effects)
    if (del_effects.count(f)) throw Error(ErrorCode::kInvalidDomain, label + " adds and deletes " + f.label());
}

bool is_applicable(const State& s, const GroundedAction& a) {
  return std::includes(s.begin(), s.end(), a.preconditions.begin(), a.preconditions.end());
}

State apply_action(const State& s, const GroundedAction& a) {
  for (const auto& f : a.preconditions)
    if (!s.count(f)) throw Error(ErrorCode::kInapplicableAction, a.label + " requires " + f.label());
  State out;
  for (const auto& f : s)
    if (!a.del_effects.count(f)) out.insert(f);
  out.insert(a.add_effects.begin(), a.add_effects.end());
  return out;
}

bool is_goal_satisfied(const State& s, const FluentSet& g) {
  return std::includes(s.begin(), s.end(), g.begin(), g.end());
}

std::string to_string(const FluentSet& s) {
  std::string out = "{";
  for (const auto& f : s) {
    if (out.size() > 1) out += ", ";
    out += f.label();
  }
  return out + "}";
}

}  // namespace grnet::planning
