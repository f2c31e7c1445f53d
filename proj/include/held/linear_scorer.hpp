#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "held/features.hpp"
#include "held/logistic.hpp"
#include "held/scorer.hpp"
#include "held/tuples.hpp"

namespace held {

/// Logistic put-or-skip scorer over extract_features().
class LinearScorer final : public Scorer {
 public:
  LinearScorer(LogisticModel model, std::shared_ptr<const PatternLibrary> patterns,
               int window = kDefaultSiblingWindow)
      : model_(std::move(model)), patterns_(std::move(patterns)), window_(window) {
    if (model_.weights().size() != feature_count())
      fail(ErrorCategory::model, "linear scorer: model has " +
                                     std::to_string(model_.weights().size()) +
                                     " weights, feature extractor produces " +
                                     std::to_string(feature_count()));
  }

  double score(const ScoreContext& ctx) const override {
    return model_.probability(extract_features(ctx, *patterns_));
  }

  const LogisticModel& model() const { return model_; }
  const PatternLibrary& patterns() const { return *patterns_; }
  std::shared_ptr<const PatternLibrary> shared_patterns() const { return patterns_; }
  int window() const { return window_; }

 private:
  LogisticModel model_;
  std::shared_ptr<const PatternLibrary> patterns_;
  int window_;
};

struct ScorerTrainingConfig {
  LogisticConfig optimizer;
  int window = kDefaultSiblingWindow;
};

inline Dataset to_dataset(const std::vector<LabeledTuple>& tuples) {
  Dataset data(feature_count());
  for (const auto& t : tuples) data.add(t.features, t.label);
  return data;
}

inline LinearScorer train_linear_scorer(const std::vector<LabeledTuple>& tuples,
                                        std::shared_ptr<const PatternLibrary> patterns,
                                        const ScorerTrainingConfig& cfg = {},
                                        TrainingReport* report = nullptr) {
  if (tuples.empty()) fail(ErrorCategory::model, "training: no tuples");
  return LinearScorer(LogisticModel::train(to_dataset(tuples), cfg.optimizer, report),
                      std::move(patterns), cfg.window);
}

/// Area under the ROC curve (Mann-Whitney, ties count one half).
inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::vector<std::size_t> idx(scores.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[idx[k]]) {
        rank_sum += avg_rank;
        ++pos;
      }
    i = j;
  }
  const std::size_t neg = idx.size() - pos;
  if (pos == 0 || neg == 0) return 0.5;
  return (rank_sum - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1)) /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace held
