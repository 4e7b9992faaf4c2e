// Classification metrics: accuracy, precision/recall/F1, MCC, ROC-AUC.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace malvis {

enum class Averaging {
  Binary,    // positive class = 1, metrics straight from TP/TN/FP/FN
  Weighted,  // one-vs-rest per class, support-weighted
};

struct EvaluationReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double mcc = 0.0;
  std::optional<double> roc_auc;
  std::string averaging_mode;
  std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
};

/// Confusion matrix counts[true][predicted] over K classes.
std::vector<std::vector<std::int64_t>> confusion_matrix(
    std::span<const int> predictions, std::span<const int> labels,
    std::size_t num_classes);

/// Scores all metrics. Binary averaging requires K == 2; weighted averaging
/// combines one-vs-rest metrics by class support (so recall == accuracy).
/// ROC-AUC needs per-sample scores (N x K); it is computed one-vs-rest with
/// trapezoidal integration and support weighting (binary: the class-1 score
/// column directly). Degenerate denominators yield 0 (MCC, P, R, F1) or are
/// excluded from the AUC weighting.
/// Throws EmptyInput, DomainError (binary with K != 2, length mismatch) and
/// MissingProbabilities when require_auc is set without scores.
EvaluationReport evaluate(std::span<const int> predictions,
                          std::span<const int> labels,
                          const std::vector<std::vector<double>>* scores,
                          std::size_t num_classes, Averaging averaging,
                          bool require_auc = false);

/// Area under the ROC curve for binary ground truth (nonzero = positive) and
/// a real-valued score; ties receive trapezoidal (0.5) credit. Returns 0.5
/// when either class is absent.
double binary_roc_auc(std::span<const std::uint8_t> positive,
                      std::span<const double> score);

}  // namespace malvis
