#include "malvis/encode.hpp"

#include <chrono>

#include "malvis/png_io.hpp"

namespace malvis {

RgbImage encode_stream(const ByteStream& data, const EncodeOptions& options) {
  RgbImage image = reshape(encode_pixels(data, options.scheme), options.reshape_width);
  if (options.native_square) {
    image = resize_nn(image, options.reshape_width, options.reshape_width);
  }
  if (options.resize) {
    image = resize_nn(image, options.resize->first, options.resize->second);
  }
  return image;
}

EncodeReport encode_file(const std::filesystem::path& input,
                         const std::filesystem::path& output,
                         const EncodeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const ByteStream data = load_input(input, options.load);
  const RgbImage image = encode_stream(data, options);
  write_png(image, output);
  const auto stop = std::chrono::steady_clock::now();

  EncodeReport report;
  report.input = input;
  report.output = output;
  report.input_bytes = data.size();
  report.width = image.width;
  report.height = image.height;
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return report;
}

}  // namespace malvis
