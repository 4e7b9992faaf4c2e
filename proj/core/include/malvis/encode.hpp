// Single-file pipeline: ingest -> encode -> reshape -> resize -> PNG.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>

#include "malvis/apk.hpp"
#include "malvis/image.hpp"

namespace malvis {

struct EncodeOptions {
  EncodingScheme scheme{};
  LoadOptions load{};
  std::uint32_t reshape_width = 256;
  bool native_square = false;  // resize the reshaped strip to width x width
  std::optional<std::pair<std::uint32_t, std::uint32_t>> resize;  // applied last
};

struct EncodeReport {
  std::filesystem::path input;
  std::filesystem::path output;
  std::uint64_t input_bytes = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  double elapsed_ms = 0.0;
};

/// In-memory pipeline: encode_pixels -> reshape -> optional square resize ->
/// optional final resize. Deterministic for fixed input and options.
RgbImage encode_stream(const ByteStream& data, const EncodeOptions& options);

/// Full file pipeline ending in a PNG at `output`. Errors propagate before
/// any file is written.
EncodeReport encode_file(const std::filesystem::path& input,
                         const std::filesystem::path& output,
                         const EncodeOptions& options);

}  // namespace malvis
