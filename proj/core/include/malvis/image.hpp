// Per-byte channel assembly, reshaping and nearest-neighbor resizing.
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "malvis/bytes.hpp"
#include "malvis/entropy.hpp"

namespace malvis {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

static_assert(sizeof(Rgb) == 3, "Rgb must be a packed byte triple");

/// Row-major 8-bit-per-channel RGB raster.
struct RgbImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<Rgb> pixels;  // width * height entries

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

enum class SchemeKind {
  Grayscale,  // r = g = b = byte value
  EntropyRB,  // entropy red/blue, green 0
  MalVisA,    // entropy red/blue, Classbyte green
  MalVisB,    // entropy red/blue, bi-gram green
};

struct EncodingScheme {
  SchemeKind kind = SchemeKind::MalVisB;
  EntropyConfig entropy{};  // unused by Grayscale
};

/// CLI/file-name spelling: "gray", "entropy", "malvis-a", "malvis-b".
const char* scheme_name(SchemeKind kind) noexcept;
std::optional<SchemeKind> scheme_from_name(std::string_view name) noexcept;

/// One pixel per input byte, in byte order. Channel values are quantized by
/// truncation: int(255 * v) with v in [0,1]. Throws EmptyInput.
std::vector<Rgb> encode_pixels(const ByteStream& data, const EncodingScheme& scheme);

/// Lays pixels out in rows of fixed_width; the final partial row is padded
/// with (0,0,0). Throws EmptyInput.
RgbImage reshape(std::vector<Rgb> pixels, std::uint32_t fixed_width = 256);

/// Nearest-neighbor resize: source index = floor(dst * src_extent / dst_extent)
/// per axis. Throws DegenerateDimensions for empty inputs or zero outputs.
RgbImage resize_nn(const RgbImage& image, std::uint32_t out_width,
                   std::uint32_t out_height);

}  // namespace malvis
