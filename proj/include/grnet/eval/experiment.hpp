#pragma once

#include <filesystem>
#include <map>
#include <vector>

#include "grnet/dataset/dataset.hpp"
#include "grnet/eval/metrics.hpp"
#include "grnet/model/model.hpp"
#include "grnet/recognizer/recognizer.hpp"

namespace grnet::eval {

// Recognizes every instance in order. Group ids follow first appearance of
// each distinct goal set.
std::vector<EvalRecord> evaluate(const std::vector<dataset::GRInstance>& instances, const model::Params& params,
                                 const planning::DomainVocabulary& vocab,
                                 recognizer::ScoreMode mode = recognizer::ScoreMode::kSum);

struct ExperimentResult {
  std::vector<EvalRecord> records;
  MetricsTable table;
};

// Loads the dataset and checkpoint (vocabulary rebuilt from the dataset's
// domain id and checked against the checkpoint), evaluates, and writes the
// records as JSON lines to report_path and the summary table as CSV next to
// it with a .csv extension. Throws kIncompatible, kIo.
ExperimentResult run_experiment(const std::filesystem::path& dataset_path,
                                const std::filesystem::path& checkpoint_path,
                                const std::filesystem::path& report_path);

std::filesystem::path summary_path(const std::filesystem::path& report_path);

struct BucketCell {
  double accuracy = 0.0;
  std::size_t count = 0;
};

// observability -> class -> accuracy; classes without instances are absent.
using BucketTable = std::map<double, std::map<int, BucketCell>>;

BucketTable bucket_table(const std::vector<EvalRecord>& records);
BucketTable run_bucket_study(const std::vector<dataset::GRInstance>& instances, const model::Params& params,
                             const planning::DomainVocabulary& vocab);

// Accuracy over the records whose class lies in [first, last]; count is 0
// (and accuracy 0) when none do.
BucketCell pooled_accuracy(const std::vector<EvalRecord>& records, int first, int last);

struct SizeStudyRow {
  double fraction = 0.0;
  std::size_t num_pairs = 0;
  double accuracy = 0.0;
  MetricsTable table;
  model::TrainReport report;
};

// First round(fraction * n) pairs of one seeded permutation, kept in their
// original order, so subsets are nested and fraction 1 is the full set.
std::vector<std::size_t> subset_indices(std::size_t n, double fraction, std::uint64_t seed);

// One model per fraction, trained sequentially with the same config.
// Throws kInvalidConfig for a fraction outside (0, 1] or one that yields
// fewer than batch_size pairs.
std::vector<SizeStudyRow> run_size_study(const std::vector<dataset::TrainingPair>& pairs,
                                         const std::vector<double>& fractions,
                                         const std::vector<dataset::GRInstance>& test,
                                         const model::ModelConfig& config, const planning::DomainVocabulary& vocab,
                                         const model::EpochCallback& on_epoch = {});

}  // namespace grnet::eval
