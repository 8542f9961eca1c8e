#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "grnet/planning/fluent.hpp"

namespace grnet::planning {

// Indexed fluents and actions of one domain. Fluents are in lexical label
// order and map to network output positions 0..|F|-1. Actions are in lexical
// label order with ids 1..|A|; id 0 is reserved for padding.
class DomainVocabulary {
 public:
  DomainVocabulary() = default;
  DomainVocabulary(std::string domain_id, std::vector<Fluent> fluents, std::vector<GroundedAction> actions);

  // Label-only vocabulary (actions carry no preconditions or effects).
  static DomainVocabulary from_labels(std::string domain_id, const std::vector<std::string>& fluent_labels,
                                      const std::vector<std::string>& action_labels);

  const std::string& domain_id() const noexcept { return domain_id_; }
  const std::vector<Fluent>& fluents() const noexcept { return fluents_; }
  const std::vector<GroundedAction>& actions() const noexcept { return actions_; }
  std::size_t num_fluents() const noexcept { return fluents_.size(); }
  std::size_t num_actions() const noexcept { return actions_.size(); }

  std::optional<std::size_t> find_fluent(const std::string& label) const;
  std::optional<std::int32_t> find_action(const std::string& label) const;

  // Throwing lookups (kOutOfVocabulary).
  std::size_t fluent_position(const std::string& label) const;
  std::int32_t action_id(const std::string& label) const;
  const GroundedAction& action(std::int32_t id) const;

  // One label per line in index order, under a small header.
  std::string manifest() const;
  static DomainVocabulary parse_manifest(std::istream& in);

  // FNV-1a 64 of the manifest text.
  std::uint64_t checksum() const noexcept { return checksum_; }

  bool operator==(const DomainVocabulary& other) const;

 private:
  void index();

  std::string domain_id_;
  std::vector<Fluent> fluents_;
  std::vector<GroundedAction> actions_;
  std::unordered_map<std::string, std::size_t> fluent_index_;
  std::unordered_map<std::string, std::int32_t> action_index_;
  std::uint64_t checksum_ = 0;
};

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash = 0xcbf29ce484222325ULL);

std::string checksum_hex(std::uint64_t checksum);
std::uint64_t parse_checksum_hex(const std::string& text);

}  // namespace grnet::planning
