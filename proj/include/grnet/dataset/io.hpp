#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "grnet/dataset/dataset.hpp"

namespace grnet::dataset {

inline constexpr int kDatasetSchemaVersion = 1;

// One JSON object per line, fields in this order:
//   version, domain, vocab (hex checksum), observations, goals, hidden,
//   observability, plan_length, seed
std::string encode_record(const GRInstance& instance, const planning::DomainVocabulary& vocab);
GRInstance decode_record(const std::string& line, const planning::DomainVocabulary& vocab, std::size_t line_no = 0);

void write_dataset(const std::filesystem::path& path, const std::vector<GRInstance>& instances,
                   const planning::DomainVocabulary& vocab);
void write_dataset(const std::filesystem::path& path, const std::vector<TrainingPair>& pairs,
                   const planning::DomainVocabulary& vocab);

// Validates every label against the vocabulary (kParse with the line number)
// and the vocabulary checksum (kIncompatible).
std::vector<GRInstance> read_dataset(const std::filesystem::path& path, const planning::DomainVocabulary& vocab);
std::vector<GRInstance> read_dataset(std::istream& in, const planning::DomainVocabulary& vocab);

std::vector<TrainingPair> read_training_pairs(const std::filesystem::path& path,
                                              const planning::DomainVocabulary& vocab);

// Domain id of the first record, if any, so tools can rebuild the vocabulary.
std::string peek_domain(const std::filesystem::path& path);

}  // namespace grnet::dataset
