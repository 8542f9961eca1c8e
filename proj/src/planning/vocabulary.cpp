#include "grnet/planning/vocabulary.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "grnet/error.hpp"

namespace grnet::planning {

namespace {
constexpr const char* kManifestHeader = "grnet-vocabulary 1";
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string checksum_hex(std::uint64_t checksum) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

std::uint64_t parse_checksum_hex(const std::string& text) {
  if (text.size() != 16 || text.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw Error(ErrorCode::kParse, "malformed checksum '" + text + "'");
  return std::stoull(text, nullptr, 16);
}

DomainVocabulary::DomainVocabulary(std::string domain_id, std::vector<Fluent> fluents,
                                   std::vector<GroundedAction> actions)
    : domain_id_(std::move(domain_id)), fluents_(std::move(fluents)), actions_(std::move(actions)) {
  if (domain_id_.empty() || domain_id_.find_first_of(" \t\n") != std::string::npos)
    throw Error(ErrorCode::kInvalidDomain, "domain id must be a non-empty token");
  std::sort(fluents_.begin(), fluents_.end());
  std::sort(actions_.begin(), actions_.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
  index();
}

DomainVocabulary DomainVocabulary::from_labels(std::string domain_id, const std::vector<std::string>& fluent_labels,
                                               const std::vector<std::string>& action_labels) {
  std::vector<Fluent> fluents;
  for (const auto& l : fluent_labels) fluents.push_back(Fluent::parse(l));
  std::vector<GroundedAction> actions;
  for (const auto& l : action_labels) {
    const auto parsed = Fluent::parse(l);  // same "(name args...)" shape
    actions.emplace_back(parsed.predicate(), parsed.args(), FluentSet{}, FluentSet{}, FluentSet{});
  }
  return DomainVocabulary(std::move(domain_id), std::move(fluents), std::move(actions));
}

void DomainVocabulary::index() {
  fluent_index_.clear();
  action_index_.clear();
  for (std::size_t i = 0; i < fluents_.size(); ++i)
    if (!fluent_index_.emplace(fluents_[i].label(), i).second)
      throw Error(ErrorCode::kInvalidDomain, "duplicate fluent " + fluents_[i].label());
  for (std::size_t i = 0; i < actions_.size(); ++i)
    if (!action_index_.emplace(actions_[i].label, static_cast<std::int32_t>(i + 1)).second)
      throw Error(ErrorCode::kInvalidDomain, "duplicate action " + actions_[i].label);
  checksum_ = fnv1a64(manifest());
}

std::optional<std::size_t> DomainVocabulary::find_fluent(const std::string& label) const {
  auto it = fluent_index_.find(label);
  if (it == fluent_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> DomainVocabulary::find_action(const std::string& label) const {
  auto it = action_index_.find(label);
  if (it == action_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t DomainVocabulary::fluent_position(const std::string& label) const {
  if (auto pos = find_fluent(label)) return *pos;
  throw Error(ErrorCode::kOutOfVocabulary, "unknown fluent " + label);
}

std::int32_t DomainVocabulary::action_id(const std::string& label) const {
  if (auto id = find_action(label)) return *id;
  throw Error(ErrorCode::kOutOfVocabulary, "unknown action " + label);
}

const GroundedAction& DomainVocabulary::action(std::int32_t id) const {
  if (id < 1 || static_cast<std::size_t>(id) > actions_.size())
    throw Error(ErrorCode::kOutOfVocabulary, "action id " + std::to_string(id) + " out of range");
  return actions_[static_cast<std::size_t>(id - 1)];
}

std::string DomainVocabulary::manifest() const {
  std::string out = std::string(kManifestHeader) + "\n";
  out += "domain " + domain_id_ + "\n";
  out += "fluents " + std::to_string(fluents_.size()) + "\n";
  for (const auto& f : fluents_) out += f.label() + "\n";
  out += "actions " + std::to_string(actions_.size()) + "\n";
  for (const auto& a : actions_) out += a.label + "\n";
  return out;
}

DomainVocabulary DomainVocabulary::parse_manifest(std::istream& in) {
  std::size_t line_no = 0;
  auto next_line = [&](const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::kParse, std::string("manifest truncated before ") + what);
    ++line_no;
    return line;
  };
  auto keyed = [&](const std::string& key) {
    const auto line = next_line(key.c_str());
    if (line.rfind(key + " ", 0) != 0)
      throw Error(ErrorCode::kParse, "manifest line " + std::to_string(line_no) + ": expected '" + key + "'");
    return line.substr(key.size() + 1);
  };
  auto count = [&](const std::string& key) {
    const auto text = keyed(key);
    try {
      return static_cast<std::size_t>(std::stoull(text));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "manifest line " + std::to_string(line_no) + ": bad count");
    }
  };
  if (next_line("header") != kManifestHeader) throw Error(ErrorCode::kParse, "not a vocabulary manifest");
  const auto domain = keyed("domain");
  std::vector<std::string> fluents(count("fluents"));
  for (auto& l : fluents) l = next_line("fluent label");
  std::vector<std::string> actions(count("actions"));
  for (auto& l : actions) l = next_line("action label");
  auto vocab = from_labels(domain, fluents, actions);
  // a manifest must already be in index order
  for (std::size_t i = 0; i < fluents.size(); ++i)
    if (vocab.fluents()[i].label() != fluents[i]) throw Error(ErrorCode::kParse, "manifest fluents not in index order");
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (vocab.actions()[i].label != actions[i]) throw Error(ErrorCode::kParse, "manifest actions not in index order");
  return vocab;
}

bool DomainVocabulary::operator==(const DomainVocabulary& other) const {
  if (domain_id_ != other.domain_id_ || fluents_ != other.fluents_ || actions_.size() != other.actions_.size())
    return false;
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const auto& a = actions_[i];
    const auto& b = other.actions_[i];
    if (a.label != b.label || a.preconditions != b.preconditions || a.add_effects != b.add_effects ||
        a.del_effects != b.del_effects)
      return false;
  }
  return true;
}

}  // namespace grnet::planning
