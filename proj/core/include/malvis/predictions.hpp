// Per-model class-probability tables and their CSV loader.
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace malvis {

/// One model's predictions: N samples x K class probabilities plus ground
/// truth. Rows are normalized to sum to 1 on load. All matrices combined by
/// an ensemble must share sample_ids and labels in identical order.
struct PredictionMatrix {
  std::string model_id;
  std::vector<std::string> sample_ids;
  std::vector<int> labels;
  std::vector<std::vector<double>> probs;

  std::size_t num_samples() const noexcept { return probs.size(); }
  std::size_t num_classes() const noexcept {
    return probs.empty() ? 0 : probs.front().size();
  }
};

/// Parses `sample_id,label,p0,...,p{K-1}` CSV. Rows whose probabilities sum
/// outside 1 +/- 1e-3 are rejected (RowNotNormalized); accepted rows are
/// renormalized exactly. Throws FormatError and InconsistentK.
PredictionMatrix load_predictions(const std::filesystem::path& path);

/// Verifies shared dimensions, sample order and labels across a model set.
/// Throws AlignmentError.
void require_aligned(std::span<const PredictionMatrix> models);

/// Optional `index,name` mapping; names for indices absent from the file
/// default to "class<i>". Throws FormatError.
std::vector<std::string> load_class_names(const std::filesystem::path& path,
                                          std::size_t num_classes);

/// Ground-truth override: a `sample_id,label` CSV (extra columns ignored, so
/// a prediction CSV works too). Order must match the model set.
std::vector<int> load_labels(const std::filesystem::path& path,
                             std::span<const std::string> expected_sample_ids);

}  // namespace malvis
