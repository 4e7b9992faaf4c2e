// Sliding-window Shannon entropy and the entropy-derived red/blue channels.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "malvis/bytes.hpp"

namespace malvis {

enum class WindowAlignment {
  Trailing,  // window covers [x, x + window_size), clamped at the stream end
  Centered,  // window covers [x - w/2, x + w - w/2), clamped at both ends
};

struct EntropyConfig {
  std::uint32_t window_size = 32;
  std::uint32_t alphabet_size = 256;
  WindowAlignment alignment = WindowAlignment::Trailing;
};

/// Red/blue intensities derived from one normalized entropy value, both in [0,1].
struct ChannelPair {
  double red = 0.0;
  double blue = 0.0;
};

/// Shannon entropy of a byte window in bits: -sum P(x) * log2(P(x)), where
/// P(x) is the frequency of byte value x divided by the window length.
/// Result lies in [0, log2(min(alphabet_size, window length))].
/// Throws EmptyWindow for an empty window.
double shannon_entropy(std::span<const std::uint8_t> window,
                       std::uint32_t alphabet_size = 256);

/// Entropy at one byte position, normalized by log2(alphabet_size) so the
/// result lies in [0,1] (1/8 of the bit value for the default alphabet).
/// The window is selected per config alignment and clamped to the stream;
/// positions near the end use a shorter window rather than padding.
/// Throws IndexOutOfRange when index >= data length.
double normalized_entropy_at(const ByteStream& data, std::size_t index,
                             const EntropyConfig& config = {});

/// max((4v - 4v^2)^4, 0): the red-channel shaping curve.
double curve(double v) noexcept;

/// Red/blue intensities for normalized entropy e in [0,1]:
/// red = curve(e - 0.5) when e > 0.5 (0 otherwise), blue = e^2.
/// Throws DomainError when e is outside [0,1].
ChannelPair entropy_channels(double e);

namespace detail {

/// Byte histogram of a bounded window plus a per-count multiplicity table.
/// entropy_bits() evaluates H = log2(n) - (1/n) * sum c*log2(c) by scanning
/// the multiplicity table, so two histograms with equal contents produce
/// bit-identical results regardless of how they were assembled. That makes
/// the rolling scanner exactly reproduce the one-shot per-index path.
class WindowHistogram {
 public:
  explicit WindowHistogram(std::uint32_t capacity);

  void insert(std::uint8_t value);
  void erase(std::uint8_t value);
  std::uint32_t size() const noexcept { return size_; }
  double entropy_bits() const;

 private:
  std::array<std::uint32_t, 256> counts_{};
  std::vector<std::uint32_t> count_multiplicity_;  // m[c] = bins with count c
  std::vector<double> weight_;                     // weight[c] = c * log2(c)
  std::uint32_t size_ = 0;
};

}  // namespace detail

/// Rolling per-position normalized entropy over a whole stream. The byte
/// histogram is updated in O(1) per position and the entropy re-evaluated
/// from it, so a full pass is O(n * window_size) in the worst case and the
/// values are bit-identical to calling normalized_entropy_at at every index.
class EntropyScanner {
 public:
  EntropyScanner(std::span<const std::uint8_t> data, const EntropyConfig& config);

  /// Normalized entropy at the current position; advances by one byte.
  double next();

  std::size_t position() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ >= data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  EntropyConfig config_;
  detail::WindowHistogram hist_;
  std::size_t pos_ = 0;
  double norm_ = 8.0;  // log2(alphabet_size)
};

namespace detail {
/// Validates window_size >= 1 and alphabet_size >= 2; throws DomainError.
void check_entropy_config(const EntropyConfig& config);
}  // namespace detail

}  // namespace malvis
