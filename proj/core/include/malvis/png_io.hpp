// PNG file IO for 8-bit RGB rasters (color type 2, no alpha, no interlacing).
#pragma once

#include <filesystem>

#include "malvis/image.hpp"

namespace malvis {

/// Writes an 8-bit RGB PNG. Decoding the file reproduces the pixel buffer
/// octet-for-octet. Throws IoFailure; DegenerateDimensions for empty images.
void write_png(const RgbImage& image, const std::filesystem::path& path);

/// Reads a PNG written by write_png. Throws IoFailure on open/decode errors
/// and FormatError for anything but 8-bit RGB.
RgbImage read_png(const std::filesystem::path& path);

}  // namespace malvis
