#include "malvis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "malvis/error.hpp"

namespace malvis {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_from(double precision, double recall) {
  return safe_div(2.0 * precision * recall, precision + recall);
}

}  // namespace

std::vector<std::vector<std::int64_t>> confusion_matrix(
    std::span<const int> predictions, std::span<const int> labels,
    std::size_t num_classes) {
  std::vector<std::vector<std::int64_t>> counts(
      num_classes, std::vector<std::int64_t>(num_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int t = labels[i];
    const int p = predictions[i];
    if (t < 0 || static_cast<std::size_t>(t) >= num_classes || p < 0 ||
        static_cast<std::size_t>(p) >= num_classes) {
      raise(ErrorCode::DomainError, "class index outside [0,K)");
    }
    ++counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return counts;
}

double binary_roc_auc(std::span<const std::uint8_t> positive,
                      std::span<const double> score) {
  std::size_t pos = 0;
  for (std::uint8_t b : positive) pos += b ? 1 : 0;
  const std::size_t neg = positive.size() - pos;
  if (pos == 0 || neg == 0) return 0.5;

  std::vector<std::size_t> order(positive.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  // Sweep descending thresholds, grouping ties, and accumulate trapezoids.
  double area = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t prev_tp = 0, prev_fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = score[order[i]];
    while (i < order.size() && score[order[i]] == threshold) {
      if (positive[order[i]]) ++tp; else ++fp;
      ++i;
    }
    area += static_cast<double>(fp - prev_fp) *
            static_cast<double>(tp + prev_tp) / 2.0;
    prev_tp = tp;
    prev_fp = fp;
  }
  return area / (static_cast<double>(pos) * static_cast<double>(neg));
}

EvaluationReport evaluate(std::span<const int> predictions,
                          std::span<const int> labels,
                          const std::vector<std::vector<double>>* scores,
                          std::size_t num_classes, Averaging averaging,
                          bool require_auc) {
  if (labels.empty()) {
    raise(ErrorCode::EmptyInput, "no samples to evaluate");
  }
  if (predictions.size() != labels.size()) {
    raise(ErrorCode::DomainError, "predictions/labels length mismatch");
  }
  if (require_auc && scores == nullptr) {
    raise(ErrorCode::MissingProbabilities,
          "ROC-AUC requested without probability scores");
  }
  if (scores != nullptr &&
      (scores->size() != labels.size() ||
       (num_classes > 0 && scores->front().size() != num_classes))) {
    raise(ErrorCode::DomainError, "score matrix dimensions mismatch");
  }

  EvaluationReport report;
  report.confusion = confusion_matrix(predictions, labels, num_classes);
  const double total = static_cast<double>(labels.size());

  if (averaging == Averaging::Binary) {
    if (num_classes != 2) {
      raise(ErrorCode::DomainError, "binary averaging requires K = 2");
    }
    report.averaging_mode = "binary";
    const double tp = static_cast<double>(report.confusion[1][1]);
    const double tn = static_cast<double>(report.confusion[0][0]);
    const double fp = static_cast<double>(report.confusion[0][1]);
    const double fn = static_cast<double>(report.confusion[1][0]);
    report.accuracy = (tp + tn) / total;
    report.precision = safe_div(tp, tp + fp);
    report.recall = safe_div(tp, tp + fn);
    report.f1 = f1_from(report.precision, report.recall);
    report.mcc = safe_div(tp * tn - fp * fn,
                          std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)));
    if (scores != nullptr) {
      std::vector<std::uint8_t> pos(labels.size());
      std::vector<double> s(labels.size());
      for (std::size_t i = 0; i < labels.size(); ++i) {
        pos[i] = labels[i] == 1 ? 1 : 0;
        s[i] = (*scores)[i][1];
      }
      report.roc_auc = binary_roc_auc(pos, s);
    }
    return report;
  }

  report.averaging_mode = "weighted";
  std::vector<double> true_count(num_classes, 0.0);
  std::vector<double> pred_count(num_classes, 0.0);
  double trace = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    trace += static_cast<double>(report.confusion[k][k]);
    for (std::size_t j = 0; j < num_classes; ++j) {
      true_count[k] += static_cast<double>(report.confusion[k][j]);
      pred_count[k] += static_cast<double>(report.confusion[j][k]);
    }
  }
  report.accuracy = trace / total;

  double precision = 0.0, recall = 0.0, f1 = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double tp = static_cast<double>(report.confusion[k][k]);
    const double p_k = safe_div(tp, pred_count[k]);
    const double r_k = safe_div(tp, true_count[k]);
    const double weight = true_count[k] / total;
    precision += weight * p_k;
    recall += weight * r_k;
    f1 += weight * f1_from(p_k, r_k);
  }
  report.precision = precision;
  report.recall = recall;
  report.f1 = f1;

  // Multiclass MCC from the full confusion matrix.
  double cross = 0.0, pred_sq = 0.0, true_sq = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    cross += true_count[k] * pred_count[k];
    pred_sq += pred_count[k] * pred_count[k];
    true_sq += true_count[k] * true_count[k];
  }
  report.mcc = safe_div(trace * total - cross,
                        std::sqrt((total * total - pred_sq) *
                                  (total * total - true_sq)));

  if (scores != nullptr) {
    double weighted_auc = 0.0, weight_sum = 0.0;
    std::vector<std::uint8_t> pos(labels.size());
    std::vector<double> s(labels.size());
    for (std::size_t k = 0; k < num_classes; ++k) {
      const double support = true_count[k];
      if (support == 0.0 || support == total) continue;  // AUC undefined
      for (std::size_t i = 0; i < labels.size(); ++i) {
        pos[i] = labels[i] == static_cast<int>(k) ? 1 : 0;
        s[i] = (*scores)[i][k];
      }
      weighted_auc += support * binary_roc_auc(pos, s);
      weight_sum += support;
    }
    report.roc_auc = weight_sum > 0.0 ? weighted_auc / weight_sum : 0.5;
  }
  return report;
}

}  // namespace malvis
