#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grnet/dataset/dataset.hpp"
#include "grnet/model/config.hpp"
#include "grnet/nn/network.hpp"
#include "grnet/planning/vocabulary.hpp"

namespace grnet::model {

using Params = nn::ModelParams<float>;
using PredictionVector = std::vector<float>;

// 1-based action ids in trace order. Throws kEmptyInput, kOutOfVocabulary.
std::vector<std::int32_t> encode_trace(const dataset::ObservationTrace& trace, const planning::DomainVocabulary& vocab);
std::vector<std::string> decode_trace(const std::vector<std::int32_t>& ids, const planning::DomainVocabulary& vocab);

// Multi-hot over the vocabulary's fluent positions. Throws kOutOfVocabulary.
std::vector<float> target_vector(const planning::FluentSet& goal, const planning::DomainVocabulary& vocab);

nn::NetworkShape network_shape(const ModelConfig& config, const planning::DomainVocabulary& vocab);

// Inference forward pass, dropout off.
PredictionVector forward(const Params& params, const std::vector<std::int32_t>& ids);

struct EpochStats {
  double train_loss = 0.0;
  double validation_loss = 0.0;
  bool operator==(const EpochStats&) const = default;
};

struct TrainReport {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 1-based, 0 when no epoch ran
  double final_train_loss = 0.0;
  double final_validation_loss = 0.0;
  double seconds = 0.0;
  std::vector<EpochStats> history;
};

struct TrainResult {
  Params params;
  TrainReport report;
};

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Seeded shuffle of 0..n-1; the first round(fraction * n) go to validation.
DataSplit split_indices(std::size_t n, double validation_fraction, std::uint64_t seed);

using EpochCallback = std::function<void(std::size_t epoch, const EpochStats&)>;

// Mini-batch Adam on the mean BCE. Batches are padded with index 0 to their
// longest trace. Returns the parameters of the epoch with the lowest
// validation loss (training loss when there is no validation split).
// Throws kInvalidConfig with fewer pairs than batch_size and
// kTrainingDivergence on a non-finite loss or gradient.
TrainResult train(const std::vector<dataset::TrainingPair>& pairs, const ModelConfig& config,
                  const planning::DomainVocabulary& vocab, const EpochCallback& on_epoch = {});

// Mean BCE over the pairs without dropout.
double evaluate_loss(const Params& params, const std::vector<std::vector<std::int32_t>>& traces,
                     const std::vector<std::vector<float>>& targets, std::size_t batch_size);

}  // namespace grnet::model
