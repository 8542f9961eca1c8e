#include "grnet/dataset/io.hpp"

#include <fstream>
#include <sstream>

#include "grnet/error.hpp"
#include "json.hpp"

namespace grnet::dataset {

using json = nlohmann::ordered_json;
using planning::DomainVocabulary;

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string encode_record(const GRInstance& inst, const DomainVocabulary& vocab) {
  json goals = json::array();
  for (const auto& g : inst.goal_set) {
    json labels = json::array();
    for (const auto& f : g) labels.push_back(f.label());
    goals.push_back(std::move(labels));
  }
  json rec;
  rec["version"] = kDatasetSchemaVersion;
  rec["domain"] = vocab.domain_id();
  rec["vocab"] = planning::checksum_hex(vocab.checksum());
  rec["observations"] = inst.trace.labels;
  rec["goals"] = std::move(goals);
  rec["hidden"] = inst.hidden_index;
  rec["observability"] = inst.trace.observability;
  rec["plan_length"] = inst.trace.source_plan_len;
  rec["seed"] = inst.seed;
  return rec.dump();
}

GRInstance decode_record(const std::string& line, const DomainVocabulary& vocab, std::size_t line_no) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::exception& e) {
    parse_fail(line_no, std::string("malformed JSON: ") + e.what());
  }
  if (!rec.is_object()) parse_fail(line_no, "record is not an object");
  GRInstance inst;
  try {
    if (rec.at("version").get<int>() != kDatasetSchemaVersion) parse_fail(line_no, "unsupported schema version");
    if (rec.at("domain").get<std::string>() != vocab.domain_id())
      throw Error(ErrorCode::kIncompatible, "line " + std::to_string(line_no) + ": record domain '" +
                                                rec.at("domain").get<std::string>() + "' differs from vocabulary '" +
                                                vocab.domain_id() + "'");
    const auto checksum = rec.at("vocab").get<std::string>();
    if (checksum != planning::checksum_hex(vocab.checksum()))
      throw Error(ErrorCode::kIncompatible,
                  "line " + std::to_string(line_no) + ": vocabulary checksum " + checksum + " does not match");
    for (const auto& l : rec.at("observations")) {
      auto label = l.get<std::string>();
      if (!vocab.find_action(label)) parse_fail(line_no, "unknown action " + label);
      inst.trace.labels.push_back(std::move(label));
    }
    for (const auto& g : rec.at("goals")) {
      planning::FluentSet goal;
      for (const auto& l : g) {
        const auto label = l.get<std::string>();
        const auto pos = vocab.find_fluent(label);
        if (!pos) parse_fail(line_no, "unknown fluent " + label);
        goal.insert(vocab.fluents()[*pos]);
      }
      inst.goal_set.push_back(std::move(goal));
    }
    inst.hidden_index = rec.at("hidden").get<std::size_t>();
    inst.trace.observability = rec.at("observability").get<double>();
    inst.trace.source_plan_len = rec.at("plan_length").get<std::size_t>();
    inst.seed = rec.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    parse_fail(line_no, std::string("bad field: ") + e.what());
  }
  if (!(inst.trace.observability > 0.0 && inst.trace.observability <= 1.0))
    parse_fail(line_no, "observability outside (0, 1]");
  if (inst.trace.source_plan_len < inst.trace.labels.size()) parse_fail(line_no, "plan shorter than its trace");
  try {
    inst.validate();
  } catch (const Error& e) {
    parse_fail(line_no, e.what());
  }
  return inst;
}

void write_dataset(const std::filesystem::path& path, const std::vector<GRInstance>& instances,
                   const DomainVocabulary& vocab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  for (const auto& inst : instances) out << encode_record(inst, vocab) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write to " + path.string() + " failed");
}

void write_dataset(const std::filesystem::path& path, const std::vector<TrainingPair>& pairs,
                   const DomainVocabulary& vocab) {
  std::vector<GRInstance> instances;
  instances.reserve(pairs.size());
  for (const auto& p : pairs) instances.push_back(as_instance(p));
  write_dataset(path, instances, vocab);
}

std::vector<GRInstance> read_dataset(std::istream& in, const DomainVocabulary& vocab) {
  std::vector<GRInstance> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    out.push_back(decode_record(line, vocab, line_no));
  }
  return out;
}

std::vector<GRInstance> read_dataset(const std::filesystem::path& path, const DomainVocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_dataset(in, vocab);
}

std::vector<TrainingPair> read_training_pairs(const std::filesystem::path& path, const DomainVocabulary& vocab) {
  std::vector<TrainingPair> pairs;
  for (const auto& inst : read_dataset(path, vocab)) pairs.push_back(as_training_pair(inst));
  return pairs;
}

std::string peek_domain(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      return json::parse(line).at("domain").get<std::string>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::kParse, "line 1: cannot read domain id");
    }
  }
  return {};
}

}  // namespace grnet::dataset
