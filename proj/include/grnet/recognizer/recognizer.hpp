#pragma once

#include <span>
#include <vector>

#include "grnet/dataset/dataset.hpp"
#include "grnet/model/model.hpp"
#include "grnet/planning/vocabulary.hpp"

namespace grnet::recognizer {

enum class ScoreMode {
  kSum,   // sum of the goal's prediction components
  kMean,  // sum divided by goal size; not used for reported results
};

struct RecognitionResult {
  std::size_t selected_index = 0;
  std::vector<double> scores;
  std::vector<double> prediction;
  double latency = 0.0;  // seconds
};

// Throws kOutOfVocabulary for a fluent outside the vocabulary and
// kInvalidShape when preds does not cover every fluent.
template <typename T>
double score_goal(const planning::FluentSet& goal, std::span<const T> preds, const planning::DomainVocabulary& vocab,
                  ScoreMode mode = ScoreMode::kSum);

// Highest score wins; ties go to the lowest index. Throws kEmptyInput.
template <typename T>
RecognitionResult select_goal(const std::vector<planning::FluentSet>& goal_set, std::span<const T> preds,
                              const planning::DomainVocabulary& vocab, ScoreMode mode = ScoreMode::kSum);

// encode -> forward -> select, with wall-clock latency of the whole pipeline.
RecognitionResult recognize(const dataset::GRInstance& instance, const model::Params& params,
                            const planning::DomainVocabulary& vocab, ScoreMode mode = ScoreMode::kSum);

}  // namespace grnet::recognizer
