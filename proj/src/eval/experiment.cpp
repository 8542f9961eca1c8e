#include "grnet/eval/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "grnet/dataset/io.hpp"
#include "grnet/error.hpp"
#include "grnet/model/checkpoint.hpp"
#include "grnet/planning/blocksworld.hpp"
#include "grnet/rng.hpp"

namespace grnet::eval {

namespace {

constexpr std::uint64_t kSubsetTag = 0x5353;

}  // namespace

std::vector<EvalRecord> evaluate(const std::vector<dataset::GRInstance>& instances, const model::Params& params,
                                 const planning::DomainVocabulary& vocab, recognizer::ScoreMode mode) {
  std::map<std::vector<planning::FluentSet>, std::size_t> groups;
  std::vector<EvalRecord> records;
  records.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto result = recognizer::recognize(inst, params, vocab, mode);
    EvalRecord r;
    r.instance_id = i;
    r.observability = inst.trace.observability;
    r.group_id = groups.try_emplace(inst.goal_set, groups.size()).first->second;
    r.goal_set_size = inst.goal_set.size();
    r.selected_index = result.selected_index;
    r.hidden_index = inst.hidden_index;
    r.correct = r.selected_index == r.hidden_index;
    r.latency = result.latency;
    if (inst.goal_set.size() > 1) {
      const auto rep = dataset::recognizability_report(inst);
      r.recognizability = rep.normalized;
      r.bucket = rep.bucket;
    }
    records.push_back(r);
  }
  return records;
}

std::filesystem::path summary_path(const std::filesystem::path& report_path) {
  auto p = report_path;
  return p.replace_extension(".csv");
}

ExperimentResult run_experiment(const std::filesystem::path& dataset_path,
                                const std::filesystem::path& checkpoint_path,
                                const std::filesystem::path& report_path) {
  const std::string domain = dataset::peek_domain(dataset_path);
  const auto vocab = planning::build_blocksworld_vocabulary(planning::blocks_in_domain(domain));
  const auto ckpt = model::load_checkpoint(checkpoint_path, vocab);
  const auto instances = dataset::read_dataset(dataset_path, vocab);

  ExperimentResult result;
  result.records = evaluate(instances, ckpt.params, vocab);
  result.table = metrics_table(result.records);

  std::ofstream records(report_path);
  if (!records) throw Error(ErrorCode::kIo, "cannot write " + report_path.string());
  for (const auto& r : result.records) records << to_json_line(r) << '\n';
  const auto csv_path = summary_path(report_path);
  std::ofstream csv(csv_path);
  if (!csv) throw Error(ErrorCode::kIo, "cannot write " + csv_path.string());
  write_csv(csv, result.table);
  return result;
}

BucketTable bucket_table(const std::vector<EvalRecord>& records) {
  std::map<double, std::map<int, std::pair<std::size_t, std::size_t>>> counts;
  for (const auto& r : records) {
    if (r.bucket == 0) continue;
    auto& c = counts[r.observability][r.bucket];
    c.first += r.correct;
    ++c.second;
  }
  BucketTable table;
  for (const auto& [obs, buckets] : counts)
    for (const auto& [b, c] : buckets)
      table[obs][b] = {100.0 * static_cast<double>(c.first) / static_cast<double>(c.second), c.second};
  return table;
}

BucketTable run_bucket_study(const std::vector<dataset::GRInstance>& instances, const model::Params& params,
                             const planning::DomainVocabulary& vocab) {
  return bucket_table(evaluate(instances, params, vocab));
}

BucketCell pooled_accuracy(const std::vector<EvalRecord>& records, int first, int last) {
  std::size_t correct = 0, total = 0;
  for (const auto& r : records) {
    if (r.bucket < first || r.bucket > last || r.bucket == 0) continue;
    correct += r.correct;
    ++total;
  }
  return {total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total), total};
}

std::vector<std::size_t> subset_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "fraction must lie in (0, 1]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, kSubsetTag));
  rng.shuffle(order);
  const auto k = std::min(n, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<SizeStudyRow> run_size_study(const std::vector<dataset::TrainingPair>& pairs,
                                         const std::vector<double>& fractions,
                                         const std::vector<dataset::GRInstance>& test,
                                         const model::ModelConfig& config, const planning::DomainVocabulary& vocab,
                                         const model::EpochCallback& on_epoch) {
  if (test.empty()) throw Error(ErrorCode::kEmptyInput, "empty test set");
  std::vector<std::vector<std::size_t>> subsets;
  for (double f : fractions) {
    auto idx = subset_indices(pairs.size(), f, config.rng_seed);
    if (idx.size() < config.batch_size)
      throw Error(ErrorCode::kInvalidConfig, "fraction " + std::to_string(f) + " gives " + std::to_string(idx.size()) +
                                                 " pairs, fewer than batch_size");
    subsets.push_back(std::move(idx));
  }
  std::vector<SizeStudyRow> rows;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    std::vector<dataset::TrainingPair> subset;
    subset.reserve(subsets[i].size());
    for (auto k : subsets[i]) subset.push_back(pairs[k]);
    auto trained = model::train(subset, config, vocab, on_epoch);
    const auto records = evaluate(test, trained.params, vocab);
    SizeStudyRow row;
    row.fraction = fractions[i];
    row.num_pairs = subset.size();
    row.accuracy = accuracy(records);
    row.table = metrics_table(records);
    row.report = std::move(trained.report);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace grnet::eval
