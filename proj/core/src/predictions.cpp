#include "malvis/predictions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "csv.hpp"
#include "malvis/error.hpp"

namespace malvis {

namespace {

double parse_double(const std::string& field, const std::string& context) {
  try {
    std::size_t consumed = 0;
    const double value = std::stod(field, &consumed);
    if (consumed != field.size()) throw std::invalid_argument(field);
    return value;
  } catch (const std::exception&) {
    raise(ErrorCode::FormatError, context + ": not a number: '" + field + "'");
  }
}

int parse_int(const std::string& field, const std::string& context) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    raise(ErrorCode::FormatError, context + ": not an integer: '" + field + "'");
  }
  return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

PredictionMatrix load_predictions(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 2) {
    raise(ErrorCode::FormatError, path.string() + ": need a header and data rows");
  }

  const std::vector<std::string> header = detail::split_csv_line(lines.front());
  if (header.size() < 4 || header[0] != "sample_id" || header[1] != "label") {
    raise(ErrorCode::FormatError,
          path.string() + ": header must be sample_id,label,p0,...");
  }
  const std::size_t num_classes = header.size() - 2;
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (header[k + 2] != "p" + std::to_string(k)) {
      raise(ErrorCode::FormatError,
            path.string() + ": probability column " + std::to_string(k) +
                " must be named p" + std::to_string(k));
    }
  }
  if (num_classes < 2) {
    raise(ErrorCode::FormatError, path.string() + ": need at least 2 classes");
  }

  PredictionMatrix matrix;
  matrix.model_id = path.stem().string();
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string context = path.string() + ":" + std::to_string(row + 1);
    const std::vector<std::string> fields = detail::split_csv_line(lines[row]);
    if (fields.size() != header.size()) {
      raise(ErrorCode::InconsistentK,
            context + ": expected " + std::to_string(header.size()) +
                " fields, got " + std::to_string(fields.size()));
    }
    const int label = parse_int(fields[1], context);
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      raise(ErrorCode::FormatError,
            context + ": label " + std::to_string(label) + " outside [0," +
                std::to_string(num_classes) + ")");
    }
    std::vector<double> probs(num_classes);
    double sum = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      probs[k] = parse_double(fields[k + 2], context);
      if (probs[k] < 0.0) {
        raise(ErrorCode::FormatError, context + ": negative probability");
      }
      sum += probs[k];
    }
    if (std::abs(sum - 1.0) > 1e-3) {
      raise(ErrorCode::RowNotNormalized,
            context + ": probabilities sum to " + std::to_string(sum));
    }
    for (double& p : probs) p /= sum;

    matrix.sample_ids.push_back(fields[0]);
    matrix.labels.push_back(label);
    matrix.probs.push_back(std::move(probs));
  }
  return matrix;
}

void require_aligned(std::span<const PredictionMatrix> models) {
  if (models.empty()) {
    raise(ErrorCode::AlignmentError, "no prediction matrices supplied");
  }
  const PredictionMatrix& first = models.front();
  if (first.num_samples() == 0) {
    raise(ErrorCode::AlignmentError, first.model_id + ": empty matrix");
  }
  for (const PredictionMatrix& m : models.subspan(1)) {
    if (m.num_samples() != first.num_samples() ||
        m.num_classes() != first.num_classes()) {
      raise(ErrorCode::AlignmentError,
            m.model_id + ": dimensions differ from " + first.model_id);
    }
    if (m.sample_ids != first.sample_ids) {
      raise(ErrorCode::AlignmentError,
            m.model_id + ": sample order differs from " + first.model_id);
    }
    if (m.labels != first.labels) {
      raise(ErrorCode::AlignmentError,
            m.model_id + ": ground-truth labels differ from " + first.model_id);
    }
  }
}

std::vector<std::string> load_class_names(const std::filesystem::path& path,
                                          std::size_t num_classes) {
  std::vector<std::string> names(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    names[k] = "class" + std::to_string(k);
  }
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const std::vector<std::string> fields = detail::split_csv_line(lines[row]);
    if (row == 0 && fields.size() >= 2 && fields[0] == "index") continue;
    if (fields.size() != 2) {
      raise(ErrorCode::FormatError,
            path.string() + ":" + std::to_string(row + 1) + ": expected index,name");
    }
    const int index = parse_int(fields[0], path.string());
    if (index < 0 || static_cast<std::size_t>(index) >= num_classes) continue;
    names[static_cast<std::size_t>(index)] = fields[1];
  }
  return names;
}

std::vector<int> load_labels(const std::filesystem::path& path,
                             std::span<const std::string> expected_sample_ids) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.size() < 2) {
    raise(ErrorCode::FormatError, path.string() + ": need a header and data rows");
  }
  std::vector<int> labels;
  std::vector<std::string> ids;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string context = path.string() + ":" + std::to_string(row + 1);
    const std::vector<std::string> fields = detail::split_csv_line(lines[row]);
    if (fields.size() < 2) {
      raise(ErrorCode::FormatError, context + ": expected sample_id,label");
    }
    ids.push_back(fields[0]);
    labels.push_back(parse_int(fields[1], context));
  }
  if (ids.size() != expected_sample_ids.size() ||
      !std::equal(ids.begin(), ids.end(), expected_sample_ids.begin())) {
    raise(ErrorCode::AlignmentError,
          path.string() + ": sample order differs from the prediction files");
  }
  return labels;
}

}  // namespace malvis
