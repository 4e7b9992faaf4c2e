// Controlled obfuscation experiments: prefix encryption / random injection
// and the channel-intensity shifts they cause in the encoded images.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "malvis/bytes.hpp"
#include "malvis/image.hpp"

namespace malvis {

using AesKey = std::array<std::uint8_t, 32>;

struct RowInterval {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;  // exclusive
};

/// Channel statistics over the unpadded pixels of a row interval, plus the
/// mean window entropy of the corresponding byte range. mean_entropy is
/// normalized by the window-size capacity log2(min(alphabet, window)), so a
/// fully random region saturates toward 1 regardless of the window size.
struct RegionStats {
  RowInterval region;
  std::size_t pixel_count = 0;
  double mean_r = 0.0, mean_g = 0.0, mean_b = 0.0;
  double var_r = 0.0, var_g = 0.0, var_b = 0.0;
  double mean_entropy = 0.0;
};

enum class ExperimentKind { Encrypt, Inject };

struct ShiftReport {
  ExperimentKind experiment = ExperimentKind::Encrypt;
  SchemeKind scheme = SchemeKind::MalVisB;
  double fraction = 0.30;
  std::size_t perturbed_bytes = 0;
  RegionStats before;
  RegionStats after;
  double delta_mean_r = 0.0, delta_mean_g = 0.0, delta_mean_b = 0.0;
  double delta_mean_entropy = 0.0;
};

/// AES-256-ECB over the first floor(fraction * length) bytes, truncated down
/// to a 16-byte block multiple; the remainder is untouched and the output
/// length equals the input length. Deterministic per key.
/// Throws DomainError unless 0 < fraction <= 1.
ByteStream encrypt_prefix(const ByteStream& data, double fraction, const AesKey& key);

/// Replaces the first floor(fraction * length) bytes with seeded uniform
/// pseudo-random bytes; deterministic per seed.
ByteStream inject_random_prefix(const ByteStream& data, double fraction,
                                std::uint64_t seed);

/// Statistics over a row interval of the width-256 reshaped encoding of data.
/// Throws RegionOutOfRange when the interval exceeds the image height.
RegionStats region_stats(const ByteStream& data, const EncodingScheme& scheme,
                         RowInterval region, std::uint32_t width = 256);

struct ExperimentOptions {
  ExperimentKind kind = ExperimentKind::Encrypt;
  EncodingScheme scheme{};
  double fraction = 0.30;
  AesKey key{};            // all-zero default, overridable
  std::uint64_t seed = 42;
  std::uint32_t width = 256;
  std::optional<std::filesystem::path> emit_dir;  // write before/after PNGs
  std::string emit_stem = "sample";
};

/// Encodes the original and perturbed streams, compares the perturbed prefix
/// rows and returns the shift report. With emit_dir set, writes
/// `<stem>.original.<scheme>.png` and `<stem>.perturbed.<scheme>.png`.
ShiftReport run_experiment(const ByteStream& original,
                           const ExperimentOptions& options);

/// `key: value` lines for CLI output.
std::string format_shift_report(const ShiftReport& report);

}  // namespace malvis
