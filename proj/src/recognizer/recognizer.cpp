#include "grnet/recognizer/recognizer.hpp"

#include <chrono>

#include "grnet/error.hpp"

namespace grnet::recognizer {

template <typename T>
double score_goal(const planning::FluentSet& goal, std::span<const T> preds, const planning::DomainVocabulary& vocab,
                  ScoreMode mode) {
  if (preds.size() != vocab.num_fluents())
    throw Error(ErrorCode::kInvalidShape, "prediction has " + std::to_string(preds.size()) + " components, expected " +
                                              std::to_string(vocab.num_fluents()));
  double sum = 0.0;
  for (const auto& f : goal) sum += static_cast<double>(preds[vocab.fluent_position(f.label())]);
  if (mode == ScoreMode::kMean && !goal.empty()) sum /= static_cast<double>(goal.size());
  return sum;
}

template <typename T>
RecognitionResult select_goal(const std::vector<planning::FluentSet>& goal_set, std::span<const T> preds,
                              const planning::DomainVocabulary& vocab, ScoreMode mode) {
  if (goal_set.empty()) throw Error(ErrorCode::kEmptyInput, "empty goal set");
  RecognitionResult r;
  r.scores.reserve(goal_set.size());
  for (const auto& g : goal_set) r.scores.push_back(score_goal(g, preds, vocab, mode));
  for (std::size_t i = 1; i < r.scores.size(); ++i)
    if (r.scores[i] > r.scores[r.selected_index]) r.selected_index = i;
  r.prediction.assign(preds.begin(), preds.end());
  return r;
}

RecognitionResult recognize(const dataset::GRInstance& instance, const model::Params& params,
                            const planning::DomainVocabulary& vocab, ScoreMode mode) {
  const auto start = std::chrono::steady_clock::now();
  const auto ids = model::encode_trace(instance.trace, vocab);
  const auto preds = model::forward(params, ids);
  auto r = select_goal(instance.goal_set, std::span<const float>(preds), vocab, mode);
  r.latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

template double score_goal<float>(const planning::FluentSet&, std::span<const float>,
                                  const planning::DomainVocabulary&, ScoreMode);
template double score_goal<double>(const planning::FluentSet&, std::span<const double>,
                                   const planning::DomainVocabulary&, ScoreMode);
template RecognitionResult select_goal<float>(const std::vector<planning::FluentSet>&, std::span<const float>,
                                              const planning::DomainVocabulary&, ScoreMode);
template RecognitionResult select_goal<double>(const std::vector<planning::FluentSet>&, std::span<const double>,
                                               const planning::DomainVocabulary&, ScoreMode);

}  // namespace grnet::recognizer
