// The eight ensemble strategies over aligned per-model probability tables.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "malvis/predictions.hpp"

namespace malvis {

enum class EnsembleMethod {
  Average,
  Majority,
  Weighted,
  MinConfidence,
  Soft,
  Median,
  RankBased,
  Stacking,
};

const char* ensemble_method_name(EnsembleMethod method) noexcept;
std::optional<EnsembleMethod> ensemble_method_from_name(std::string_view name) noexcept;

/// Predicted class per sample plus a per-sample score vector used for
/// ROC-AUC. Scores are method-specific rankings, not calibrated
/// probabilities: mean probabilities (average/soft/weighted/min-confidence),
/// vote fractions (majority), per-class medians (median), normalized Borda
/// points (rank-based), softmax outputs (stacking).
struct EnsembleResult {
  std::vector<int> predictions;
  std::vector<std::vector<double>> scores;
};

/// Argmax of the element-wise mean of probability rows; ties break to the
/// lowest class index (as everywhere below).
EnsembleResult average_voting(std::span<const PredictionMatrix> models);

/// Each model votes its argmax; the modal class wins. Vote ties break by the
/// highest probability summed over all models among the tied classes, then
/// lowest index.
EnsembleResult majority_voting(std::span<const PredictionMatrix> models);

/// Argmax of the weighted mean of probability rows; weights are normalized
/// to sum to 1. Throws MissingRankSource when weights do not match the model
/// count or are not positive.
EnsembleResult weighted_voting(std::span<const PredictionMatrix> models,
                               std::span<const double> weights);

/// Rank weights from validation accuracies: the best of M models gets weight
/// M, the worst 1 (ties keep input order), normalized to sum to 1.
std::vector<double> rank_weights_from_accuracy(std::span<const double> accuracies);

/// Per sample, only models whose top-class probability reaches the threshold
/// vote (combined by averaging); when none qualifies, all models vote.
EnsembleResult min_confidence_voting(std::span<const PredictionMatrix> models,
                                     double threshold = 0.60);

/// Decision-identical to average_voting (combining summed probabilities
/// selects the same argmax as their mean); kept as a distinct method name.
EnsembleResult soft_voting(std::span<const PredictionMatrix> models);

/// Argmax of the per-class median across models (even counts use the mean of
/// the two central values).
EnsembleResult median_voting(std::span<const PredictionMatrix> models);

/// Borda count: per model, classes earn K-1 points down to 0 by descending
/// probability; tied probabilities share the mean of their positions'
/// points. The class with the highest summed points wins.
EnsembleResult rank_voting(std::span<const PredictionMatrix> models);

struct StackParams {
  double learning_rate = 0.5;
  int epochs = 500;
  std::uint64_t seed = 42;
};

/// Multinomial logistic regression over the concatenated M*K probability
/// features, trained by seeded full-batch gradient descent.
class StackModel {
 public:
  StackModel() = default;

  bool trained() const noexcept { return num_classes_ > 0; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  /// Class scores (softmax) for one concatenated feature vector.
  std::vector<double> scores(std::span<const double> features) const;

 private:
  friend StackModel stack_train(std::span<const PredictionMatrix>,
                                const StackParams&);
  std::size_t feature_dim_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<double> weights_;  // num_classes x (feature_dim + 1), row-major
};

/// Trains the meta-learner on validation-split predictions; ground truth
/// comes from the aligned matrices' label column. Deterministic per seed.
StackModel stack_train(std::span<const PredictionMatrix> validation_models,
                       const StackParams& params = {});

/// Applies the meta-learner to test-split predictions. Throws NotTrained and
/// DimensionMismatch.
EnsembleResult stack_predict(const StackModel& model,
                             std::span<const PredictionMatrix> test_models);

}  // namespace malvis
