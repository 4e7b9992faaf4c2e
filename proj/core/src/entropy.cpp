#include "malvis/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "malvis/error.hpp"

namespace malvis {

namespace detail {

void check_entropy_config(const EntropyConfig& config) {
  if (config.window_size < 1) {
    raise(ErrorCode::DomainError, "window_size must be >= 1");
  }
  if (config.alphabet_size < 2) {
    raise(ErrorCode::DomainError, "alphabet_size must be >= 2");
  }
}

WindowHistogram::WindowHistogram(std::uint32_t capacity)
    : count_multiplicity_(capacity + 1, 0), weight_(capacity + 1, 0.0) {
  for (std::uint32_t c = 2; c <= capacity; ++c) {
    weight_[c] = static_cast<double>(c) * std::log2(static_cast<double>(c));
  }
}

void WindowHistogram::insert(std::uint8_t value) {
  const std::uint32_t c = ++counts_[value];
  if (c > 1) --count_multiplicity_[c - 1];
  ++count_multiplicity_[c];
  ++size_;
}

void WindowHistogram::erase(std::uint8_t value) {
  const std::uint32_t c = counts_[value]--;
  --count_multiplicity_[c];
  if (c > 1) ++count_multiplicity_[c - 1];
  --size_;
}

double WindowHistogram::entropy_bits() const {
  if (size_ <= 1) return 0.0;
  // H = log2(n) - S/n with S = sum over counts of c*log2(c). Counts of 1
  // contribute nothing, so the scan starts at 2. The subtraction can land one
  // ulp below zero for single-symbol windows; entropy is nonnegative.
  double weighted = 0.0;
  for (std::uint32_t c = 2; c <= size_; ++c) {
    const std::uint32_t m = count_multiplicity_[c];
    if (m != 0) weighted += static_cast<double>(m) * weight_[c];
  }
  const double n = static_cast<double>(size_);
  return std::max(std::log2(n) - weighted / n, 0.0);
}

double normalized_from_bits(double bits, double norm) {
  const double e = bits / norm;
  // Rounding in the histogram formula may overshoot the top of the range by
  // an ulp; genuine misconfiguration (alphabet smaller than the window's
  // byte diversity) still lands far outside and is reported downstream.
  if (e > 1.0 && e < 1.0 + 1e-9) return 1.0;
  return e;
}

namespace {

struct WindowBounds {
  std::size_t lo;
  std::size_t hi;
};

WindowBounds window_bounds(std::size_t index, std::size_t length,
                           const EntropyConfig& config) {
  const std::size_t w = config.window_size;
  if (config.alignment == WindowAlignment::Trailing) {
    return {index, std::min(length, index + w)};
  }
  const std::size_t half_lo = w / 2;
  const std::size_t lo = index > half_lo ? index - half_lo : 0;
  return {lo, std::min(length, index + (w - half_lo))};
}

}  // namespace

}  // namespace detail

double shannon_entropy(std::span<const std::uint8_t> window,
                       std::uint32_t alphabet_size) {
  if (window.empty()) {
    raise(ErrorCode::EmptyWindow, "cannot compute entropy of an empty window");
  }
  if (alphabet_size < 2) {
    raise(ErrorCode::DomainError, "alphabet_size must be >= 2");
  }
  std::array<std::uint64_t, 256> counts{};
  for (std::uint8_t b : window) ++counts[b];

  const double n = static_cast<double>(window.size());
  double entropy = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    entropy -= p * std::log2(p);
  }
  return entropy;
}

double normalized_entropy_at(const ByteStream& data, std::size_t index,
                             const EntropyConfig& config) {
  detail::check_entropy_config(config);
  if (index >= data.size()) {
    raise(ErrorCode::IndexOutOfRange, "index " + std::to_string(index) +
                                          " >= stream length " +
                                          std::to_string(data.size()));
  }
  const auto [lo, hi] = detail::window_bounds(index, data.size(), config);
  detail::WindowHistogram hist(config.window_size);
  for (std::size_t i = lo; i < hi; ++i) hist.insert(data[i]);
  return hist.entropy_bits() / std::log2(static_cast<double>(config.alphabet_size));
}

double curve(double v) noexcept {
  const double f = 4.0 * v - 4.0 * v * v;
  const double f2 = f * f;
  return std::max(f2 * f2, 0.0);
}

ChannelPair entropy_channels(double e) {
  if (!(e >= 0.0 && e <= 1.0)) {
    raise(ErrorCode::DomainError,
          "normalized entropy " + std::to_string(e) + " outside [0,1]");
  }
  ChannelPair out;
  out.red = e > 0.5 ? curve(e - 0.5) : 0.0;
  out.blue = e * e;
  return out;
}

namespace {

std::uint32_t validated_window_size(const EntropyConfig& config) {
  detail::check_entropy_config(config);
  return config.window_size;
}

}  // namespace

EntropyScanner::EntropyScanner(std::span<const std::uint8_t> data,
                               const EntropyConfig& config)
    : data_(data), config_(config), hist_(validated_window_size(config)) {
  norm_ = std::log2(static_cast<double>(config_.alphabet_size));
  if (data_.empty()) return;
  const auto [lo, hi] = detail::window_bounds(0, data_.size(), config_);
  for (std::size_t i = lo; i < hi; ++i) hist_.insert(data_[i]);
}

double EntropyScanner::next() {
  if (pos_ >= data_.size()) {
    raise(ErrorCode::IndexOutOfRange, "scanner exhausted");
  }
  const double e = hist_.entropy_bits() / norm_;

  const std::size_t n = data_.size();
  const std::size_t w = config_.window_size;
  if (config_.alignment == WindowAlignment::Trailing) {
    hist_.erase(data_[pos_]);
    if (pos_ + w < n) hist_.insert(data_[pos_ + w]);
  } else {
    const std::size_t half_lo = w / 2;
    const std::size_t half_hi = w - half_lo;
    if (pos_ >= half_lo) hist_.erase(data_[pos_ - half_lo]);
    if (pos_ + half_hi < n) hist_.insert(data_[pos_ + half_hi]);
  }
  ++pos_;
  return e;
}

}  // namespace malvis
