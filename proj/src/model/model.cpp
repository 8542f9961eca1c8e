#include "grnet/model/model.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "grnet/error.hpp"
#include "grnet/nn/adam.hpp"
#include "grnet/rng.hpp"

namespace grnet::model {

namespace {

constexpr std::uint64_t kSplitTag = 0x5350;
constexpr std::uint64_t kInitTag = 0x494e;
constexpr std::uint64_t kEpochTag = 0x4550;
constexpr std::uint64_t kDropoutTag = 0x4450;

nn::Batch make_batch(const std::vector<std::vector<std::int32_t>>& traces, const std::vector<std::size_t>& order,
                     std::size_t begin, std::size_t end) {
  std::vector<std::vector<std::int32_t>> seqs;
  seqs.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) seqs.push_back(traces[order[i]]);
  return nn::Batch::from_sequences(seqs);
}

nn::Matrix<float> make_targets(const std::vector<std::vector<float>>& targets, const std::vector<std::size_t>& order,
                               std::size_t begin, std::size_t end) {
  const std::size_t width = targets[order[begin]].size();
  nn::Matrix<float> out(end - begin, width);
  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = targets[order[i]];
    std::copy(t.begin(), t.end(), out.row_ptr(i - begin));
  }
  return out;
}

nn::Matrix<float> dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
  if (rate <= 0.0) return {};
  nn::Matrix<float> m(rows, cols);
  const float keep = static_cast<float>(1.0 / (1.0 - rate));
  for (auto& v : m.values()) v = rng.bernoulli(rate) ? 0.0f : keep;
  return m;
}

double loss_over(const Params& params, const std::vector<std::vector<std::int32_t>>& traces,
                 const std::vector<std::vector<float>>& targets, const std::vector<std::size_t>& order,
                 std::size_t batch_size) {
  if (order.empty()) return 0.0;
  nn::ForwardCache<float> cache;
  double total = 0.0;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(order.size(), begin + batch_size);
    nn::forward(params, make_batch(traces, order, begin, end), cache);
    total += nn::batch_loss(cache, make_targets(targets, order, begin, end)) * static_cast<double>(end - begin);
  }
  return total / static_cast<double>(order.size());
}

}  // namespace

std::vector<std::int32_t> encode_trace(const dataset::ObservationTrace& trace,
                                       const planning::DomainVocabulary& vocab) {
  if (trace.labels.empty()) throw Error(ErrorCode::kEmptyInput, "empty observation trace");
  std::vector<std::int32_t> ids;
  ids.reserve(trace.labels.size());
  for (const auto& label : trace.labels) ids.push_back(vocab.action_id(label));
  return ids;
}

std::vector<std::string> decode_trace(const std::vector<std::int32_t>& ids, const planning::DomainVocabulary& vocab) {
  std::vector<std::string> labels;
  labels.reserve(ids.size());
  for (auto id : ids) labels.push_back(vocab.action(id).label);
  return labels;
}

std::vector<float> target_vector(const planning::FluentSet& goal, const planning::DomainVocabulary& vocab) {
  std::vector<float> t(vocab.num_fluents(), 0.0f);
  for (const auto& f : goal) t[vocab.fluent_position(f.label())] = 1.0f;
  return t;
}

nn::NetworkShape network_shape(const ModelConfig& config, const planning::DomainVocabulary& vocab) {
  return {vocab.num_actions(), config.embedding_dim, config.hidden_size, vocab.num_fluents()};
}

PredictionVector forward(const Params& params, const std::vector<std::int32_t>& ids) {
  return nn::predict(params, ids);
}

DataSplit split_indices(std::size_t n, double validation_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, kSplitTag));
  rng.shuffle(order);
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));
  DataSplit split;
  split.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n_val, n)));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(std::min(n_val, n)), order.end());
  return split;
}

double evaluate_loss(const Params& params, const std::vector<std::vector<std::int32_t>>& traces,
                     const std::vector<std::vector<float>>& targets, std::size_t batch_size) {
  if (traces.size() != targets.size()) throw Error(ErrorCode::kInvalidShape, "traces and targets differ in count");
  std::vector<std::size_t> order(traces.size());
  std::iota(order.begin(), order.end(), 0);
  return loss_over(params, traces, targets, order, std::max<std::size_t>(batch_size, 1));
}

TrainResult train(const std::vector<dataset::TrainingPair>& pairs, const ModelConfig& config,
                  const planning::DomainVocabulary& vocab, const EpochCallback& on_epoch) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (pairs.size() < config.batch_size)
    throw Error(ErrorCode::kInvalidConfig, "need at least batch_size (" + std::to_string(config.batch_size) +
                                               ") training pairs, got " + std::to_string(pairs.size()));

  std::vector<std::vector<std::int32_t>> traces;
  std::vector<std::vector<float>> targets;
  traces.reserve(pairs.size());
  targets.reserve(pairs.size());
  for (const auto& p : pairs) {
    traces.push_back(encode_trace(p.trace, vocab));
    targets.push_back(target_vector(p.hidden_goal, vocab));
  }

  DataSplit split = split_indices(pairs.size(), config.validation_fraction, config.rng_seed);
  if (split.train.empty()) throw Error(ErrorCode::kInvalidConfig, "validation split leaves no training data");

  const auto shape = network_shape(config, vocab);
  TrainResult result;
  result.params = nn::init_params<float>(shape, derive_seed(config.rng_seed, kInitTag));

  const std::size_t bs = config.batch_size;
  auto& report = result.report;
  if (config.epochs == 0) {
    report.final_train_loss = loss_over(result.params, traces, targets, split.train, bs);
    report.final_validation_loss = loss_over(result.params, traces, targets, split.validation, bs);
  } else {
    nn::AdamConfig adam_cfg;
    adam_cfg.learning_rate = config.learning_rate;
    nn::AdamState<float> adam(shape, adam_cfg);
    Params params = result.params;
    nn::ForwardCache<float> cache;
    Rng dropout_rng(derive_seed(config.rng_seed, kDropoutTag));
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order = split.train;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
      Rng epoch_rng(derive_seed(derive_seed(config.rng_seed, kEpochTag), epoch));
      epoch_rng.shuffle(order);
      double total = 0.0;
      for (std::size_t begin = 0; begin < order.size(); begin += bs) {
        const std::size_t end = std::min(order.size(), begin + bs);
        const nn::Batch batch = make_batch(traces, order, begin, end);
        const nn::Matrix<float> t = make_targets(targets, order, begin, end);
        nn::DropoutMasks<float> masks{dropout_mask(batch.size, shape.embedding_dim, config.dropout, dropout_rng),
                                      dropout_mask(batch.size, shape.hidden_size, config.recurrent_dropout,
                                                   dropout_rng)};
        nn::forward(params, batch, cache, &masks);
        const double loss = nn::batch_loss(cache, t);
        if (!std::isfinite(loss))
          throw Error(ErrorCode::kTrainingDivergence, "non-finite loss in epoch " + std::to_string(epoch));
        total += loss * static_cast<double>(end - begin);
        nn::adam_step(params, nn::backward(cache, t, params), adam);
      }
      EpochStats stats;
      stats.train_loss = total / static_cast<double>(order.size());
      stats.validation_loss = split.validation.empty()
                                  ? stats.train_loss
                                  : loss_over(params, traces, targets, split.validation, bs);
      if (!std::isfinite(stats.validation_loss))
        throw Error(ErrorCode::kTrainingDivergence, "non-finite validation loss in epoch " + std::to_string(epoch));
      report.history.push_back(stats);
      if (stats.validation_loss < best) {
        best = stats.validation_loss;
        report.best_epoch = epoch;
        report.final_train_loss = stats.train_loss;
        report.final_validation_loss = stats.validation_loss;
        result.params = params;
      }
      if (on_epoch) on_epoch(epoch, stats);
    }
    report.epochs_run = config.epochs;
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace grnet::model
