#include "malvis/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "malvis/error.hpp"

namespace malvis {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const RgbImage& image, const std::filesystem::path& path) {
  if (image.width == 0 || image.height == 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    raise(ErrorCode::DegenerateDimensions, "refusing to write a degenerate image");
  }

  FileHandle file(std::fopen(path.string().c_str(), "wb"));
  if (!file) {
    raise(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    raise(ErrorCode::IoFailure, "libpng initialization failed");
  }

  // Row pointers are assembled before the setjmp region so no C++ object
  // with a destructor lives inside it.
  std::vector<png_bytep> rows(image.height);
  for (std::uint32_t y = 0; y < image.height; ++y) {
    rows[y] = const_cast<png_bytep>(
        reinterpret_cast<const png_byte*>(image.pixels.data() +
                                          static_cast<std::size_t>(y) * image.width));
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    raise(ErrorCode::IoFailure, "libpng write error for " + path.string());
  }

  png_init_io(png, file.get());
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);

  if (std::fflush(file.get()) != 0) {
    raise(ErrorCode::IoFailure, "flush failed for " + path.string());
  }
}

RgbImage read_png(const std::filesystem::path& path) {
  FileHandle file(std::fopen(path.string().c_str(), "rb"));
  if (!file) {
    raise(ErrorCode::IoFailure, "cannot open " + path.string());
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorCode::IoFailure, "libpng initialization failed");
  }

  RgbImage image;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorCode::IoFailure, "libpng read error for " + path.string());
  }

  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth != 8 || color_type != PNG_COLOR_TYPE_RGB) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorCode::FormatError,
          path.string() + ": expected 8-bit RGB (color type 2)");
  }

  image.width = width;
  image.height = height;
  image.pixels.resize(static_cast<std::size_t>(width) * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = reinterpret_cast<png_bytep>(image.pixels.data() +
                                          static_cast<std::size_t>(y) * width);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

}  // namespace malvis
