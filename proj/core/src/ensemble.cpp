#include "malvis/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "malvis/error.hpp"

namespace malvis {

const char* ensemble_method_name(EnsembleMethod method) noexcept {
  switch (method) {
    case EnsembleMethod::Average: return "average";
    case EnsembleMethod::Majority: return "majority";
    case EnsembleMethod::Weighted: return "weighted";
    case EnsembleMethod::MinConfidence: return "min-confidence";
    case EnsembleMethod::Soft: return "soft";
    case EnsembleMethod::Median: return "median";
    case EnsembleMethod::RankBased: return "rank";
    case EnsembleMethod::Stacking: return "stacking";
  }
  return "unknown";
}

std::optional<EnsembleMethod> ensemble_method_from_name(
    std::string_view name) noexcept {
  if (name == "average") return EnsembleMethod::Average;
  if (name == "majority") return EnsembleMethod::Majority;
  if (name == "weighted") return EnsembleMethod::Weighted;
  if (name == "min-confidence") return EnsembleMethod::MinConfidence;
  if (name == "soft") return EnsembleMethod::Soft;
  if (name == "median") return EnsembleMethod::Median;
  if (name == "rank" || name == "rank-based") return EnsembleMethod::RankBased;
  if (name == "stacking") return EnsembleMethod::Stacking;
  return std::nullopt;
}

namespace {

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(values.size()); ++k) {
    if (values[static_cast<std::size_t>(k)] > values[static_cast<std::size_t>(best)]) {
      best = k;
    }
  }
  return best;
}

EnsembleResult from_scores(std::vector<std::vector<double>> scores) {
  EnsembleResult result;
  result.predictions.reserve(scores.size());
  for (const std::vector<double>& row : scores) {
    result.predictions.push_back(argmax_lowest(row));
  }
  result.scores = std::move(scores);
  return result;
}

std::vector<std::vector<double>> mean_rows(std::span<const PredictionMatrix> models) {
  const std::size_t n = models.front().num_samples();
  const std::size_t k = models.front().num_classes();
  std::vector<std::vector<double>> mean(n, std::vector<double>(k, 0.0));
  for (const PredictionMatrix& m : models) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) mean[i][c] += m.probs[i][c];
    }
  }
  const double inv = 1.0 / static_cast<double>(models.size());
  for (auto& row : mean) {
    for (double& v : row) v *= inv;
  }
  return mean;
}

}  // namespace

EnsembleResult average_voting(std::span<const PredictionMatrix> models) {
  require_aligned(models);
  return from_scores(mean_rows(models));
}

EnsembleResult majority_voting(std::span<const PredictionMatrix> models) {
  require_aligned(models);
  const std::size_t n = models.front().num_samples();
  const std::size_t k = models.front().num_classes();

  EnsembleResult result;
  result.predictions.resize(n);
  result.scores.assign(n, std::vector<double>(k, 0.0));

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> votes(k, 0.0);
    std::vector<double> summed(k, 0.0);
    for (const PredictionMatrix& m : models) {
      votes[static_cast<std::size_t>(argmax_lowest(m.probs[i]))] += 1.0;
      for (std::size_t c = 0; c < k; ++c) summed[c] += m.probs[i][c];
    }
    const double top = *std::max_element(votes.begin(), votes.end());
    int winner = -1;
    double winner_prob = -1.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (votes[c] == top && summed[c] > winner_prob) {
        winner = static_cast<int>(c);
        winner_prob = summed[c];
      }
    }
    result.predictions[i] = winner;
    const double inv = 1.0 / static_cast<double>(models.size());
    for (std::size_t c = 0; c < k; ++c) result.scores[i][c] = votes[c] * inv;
  }
  return result;
}

std::vector<double> rank_weights_from_accuracy(std::span<const double> accuracies) {
  const std::size_t m = accuracies.size();
  if (m == 0) {
    raise(ErrorCode::MissingRankSource, "no validation accuracies supplied");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return accuracies[a] > accuracies[b];
  });
  std::vector<double> weights(m, 0.0);
  for (std::size_t pos = 0; pos < m; ++pos) {
    weights[order[pos]] = static_cast<double>(m - pos);  // best M ... worst 1
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= sum;
  return weights;
}

EnsembleResult weighted_voting(std::span<const PredictionMatrix> models,
                               std::span<const double> weights) {
  require_aligned(models);
  if (weights.size() != models.size()) {
    raise(ErrorCode::MissingRankSource,
          "need one weight per model (" + std::to_string(models.size()) +
              "), got " + std::to_string(weights.size()));
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      raise(ErrorCode::MissingRankSource, "weights must be non-negative");
    }
    sum += w;
  }
  if (sum <= 0.0) {
    raise(ErrorCode::MissingRankSource, "weights must not all be zero");
  }

  const std::size_t n = models.front().num_samples();
  const std::size_t k = models.front().num_classes();
  std::vector<std::vector<double>> combined(n, std::vector<double>(k, 0.0));
  for (std::size_t m = 0; m < models.size(); ++m) {
    const double w = weights[m] / sum;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) combined[i][c] += w * models[m].probs[i][c];
    }
  }
  return from_scores(std::move(combined));
}

EnsembleResult min_confidence_voting(std::span<const PredictionMatrix> models,
                                     double threshold) {
  require_aligned(models);
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    raise(ErrorCode::DomainError,
          "confidence threshold " + std::to_string(threshold) + " outside [0,1]");
  }
  const std::size_t n = models.front().num_samples();
  const std::size_t k = models.front().num_classes();

  std::vector<std::vector<double>> combined(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t qualifying = 0;
    for (const PredictionMatrix& m : models) {
      const double top = *std::max_element(m.probs[i].begin(), m.probs[i].end());
      if (top >= threshold) {
        ++qualifying;
        for (std::size_t c = 0; c < k; ++c) combined[i][c] += m.probs[i][c];
      }
    }
    if (qualifying == 0) {  // empty quorum: fall back to all models
      for (const PredictionMatrix& m : models) {
        for (std::size_t c = 0; c < k; ++c) combined[i][c] += m.probs[i][c];
      }
      qualifying = models.size();
    }
    const double inv = 1.0 / static_cast<double>(qualifying);
    for (std::size_t c = 0; c < k; ++c) combined[i][c] *= inv;
  }
  return from_scores(std::move(combined));
}

EnsembleResult soft_voting(std::span<const PredictionMatrix> models) {
  return average_voting(models);
}

EnsembleResult median_voting(std::span<const PredictionMatrix> models) {
  require_aligned(models);
  const std::size_t n = models.front().num_samples();
  const std::size_t k = models.front().num_classes();
  const std::size_t m = models.size();

  std::vector<std::vector<double>> medians(n, std::vector<double>(k, 0.0));
  std::vector<double> column(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < m; ++j) column[j] = models[j].probs[i][c];
      std::sort(column.begin(), column.end());
      medians[i][c] = (m % 2 == 1)
                          ? column[m / 2]
                          : (column[m / 2 - 1] + column[m / 2]) / 2.0;
    }
  }
  return from_scores(std::move(medians));
}

EnsembleResult rank_voting(std::span<const PredictionMatrix> models) {
  require_aligned(models);
  const std::size_t n = models.front().num_samples();
  const std::size_t k = models.front().num_classes();

  std::vector<std::vector<double>> borda(n, std::vector<double>(k, 0.0));
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (const PredictionMatrix& m : models) {
      const std::vector<double>& row = m.probs[i];
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
      // Tied probabilities share the mean of their positions' points.
      std::size_t pos = 0;
      while (pos < k) {
        std::size_t end = pos + 1;
        while (end < k && row[order[end]] == row[order[pos]]) ++end;
        const double first = static_cast<double>(k - 1 - pos);
        const double last = static_cast<double>(k - end);
        const double shared = (first + last) / 2.0;
        for (std::size_t j = pos; j < end; ++j) borda[i][order[j]] += shared;
        pos = end;
      }
    }
  }
  // Normalize so each row sums to 1 (total points per model sum to K(K-1)/2).
  const double total = static_cast<double>(models.size()) *
                       static_cast<double>(k) * static_cast<double>(k - 1) / 2.0;
  if (total > 0.0) {
    for (auto& row : borda) {
      for (double& v : row) v /= total;
    }
  }
  return from_scores(std::move(borda));
}

std::vector<double> StackModel::scores(std::span<const double> features) const {
  if (!trained()) {
    raise(ErrorCode::NotTrained, "stacking meta-model has not been trained");
  }
  if (features.size() != feature_dim_) {
    raise(ErrorCode::DimensionMismatch,
          "expected " + std::to_string(feature_dim_) + " features, got " +
              std::to_string(features.size()));
  }
  std::vector<double> logits(num_classes_, 0.0);
  for (std::size_t c = 0; c < num_classes_; ++c) {
    const double* row = weights_.data() + c * (feature_dim_ + 1);
    double z = row[feature_dim_];  // bias
    for (std::size_t f = 0; f < feature_dim_; ++f) z += row[f] * features[f];
    logits[c] = z;
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    sum += z;
  }
  for (double& z : logits) z /= sum;
  return logits;
}

namespace {

std::vector<std::vector<double>> stacked_features(
    std::span<const PredictionMatrix> models) {
  const std::size_t n = models.front().num_samples();
  const std::size_t k = models.front().num_classes();
  std::vector<std::vector<double>> features(n);
  for (std::size_t i = 0; i < n; ++i) {
    features[i].reserve(models.size() * k);
    for (const PredictionMatrix& m : models) {
      features[i].insert(features[i].end(), m.probs[i].begin(), m.probs[i].end());
    }
  }
  return features;
}

double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

StackModel stack_train(std::span<const PredictionMatrix> validation_models,
                       const StackParams& params) {
  require_aligned(validation_models);
  if (params.epochs < 1 || params.learning_rate <= 0.0) {
    raise(ErrorCode::DomainError, "stacking needs epochs >= 1 and a positive rate");
  }
  const std::size_t n = validation_models.front().num_samples();
  const std::size_t k = validation_models.front().num_classes();
  const std::size_t dim = validation_models.size() * k;
  const std::vector<std::vector<double>> features = stacked_features(validation_models);
  const std::vector<int>& labels = validation_models.front().labels;

  StackModel model;
  model.feature_dim_ = dim;
  model.num_classes_ = k;
  model.weights_.resize(k * (dim + 1));
  std::mt19937_64 engine(params.seed);
  for (double& w : model.weights_) {
    w = (unit_uniform(engine) - 0.5) * 0.02;
  }

  std::vector<double> gradient(model.weights_.size());
  const double scale = params.learning_rate / static_cast<double>(n);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> p = model.scores(features[i]);
      for (std::size_t c = 0; c < k; ++c) {
        const double err = p[c] - (labels[i] == static_cast<int>(c) ? 1.0 : 0.0);
        double* grad_row = gradient.data() + c * (dim + 1);
        for (std::size_t f = 0; f < dim; ++f) grad_row[f] += err * features[i][f];
        grad_row[dim] += err;
      }
    }
    for (std::size_t j = 0; j < model.weights_.size(); ++j) {
      model.weights_[j] -= scale * gradient[j];
    }
  }
  return model;
}

EnsembleResult stack_predict(const StackModel& model,
                             std::span<const PredictionMatrix> test_models) {
  if (!model.trained()) {
    raise(ErrorCode::NotTrained, "stacking meta-model has not been trained");
  }
  require_aligned(test_models);
  const std::size_t dim =
      test_models.size() * test_models.front().num_classes();
  if (dim != model.feature_dim()) {
    raise(ErrorCode::DimensionMismatch,
          "meta-model expects " + std::to_string(model.feature_dim()) +
              " features, test set provides " + std::to_string(dim));
  }
  const std::vector<std::vector<double>> features = stacked_features(test_models);
  std::vector<std::vector<double>> scores;
  scores.reserve(features.size());
  for (const std::vector<double>& x : features) {
    scores.push_back(model.scores(x));
  }
  return from_scores(std::move(scores));
}

}  // namespace malvis
