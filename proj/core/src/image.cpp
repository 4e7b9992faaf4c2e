#include "malvis/image.hpp"

#include <utility>

#include "malvis/error.hpp"
#include "malvis/ngram.hpp"

namespace malvis {

const char* scheme_name(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::Grayscale: return "gray";
    case SchemeKind::EntropyRB: return "entropy";
    case SchemeKind::MalVisA: return "malvis-a";
    case SchemeKind::MalVisB: return "malvis-b";
  }
  return "unknown";
}

std::optional<SchemeKind> scheme_from_name(std::string_view name) noexcept {
  if (name == "gray" || name == "grayscale") return SchemeKind::Grayscale;
  if (name == "entropy") return SchemeKind::EntropyRB;
  if (name == "malvis-a") return SchemeKind::MalVisA;
  if (name == "malvis-b") return SchemeKind::MalVisB;
  return std::nullopt;
}

namespace {

inline std::uint8_t quantize(double v) noexcept {
  return static_cast<std::uint8_t>(static_cast<int>(255.0 * v));
}

}  // namespace

std::vector<Rgb> encode_pixels(const ByteStream& data, const EncodingScheme& scheme) {
  if (data.empty()) {
    raise(ErrorCode::EmptyInput, "cannot encode an empty stream");
  }
  const std::size_t n = data.size();
  std::vector<Rgb> pixels(n);

  if (scheme.kind == SchemeKind::Grayscale) {
    for (std::size_t x = 0; x < n; ++x) {
      const std::uint8_t v = data[x];
      pixels[x] = Rgb{v, v, v};
    }
    return pixels;
  }

  EntropyScanner scanner(data.view(), scheme.entropy);
  for (std::size_t x = 0; x < n; ++x) {
    const ChannelPair rb = entropy_channels(scanner.next());
    double g = 0.0;
    switch (scheme.kind) {
      case SchemeKind::MalVisB:
        g = x + 1 < n ? bigram_value(data[x], data[x + 1]) / 65535.0 : 0.0;
        break;
      case SchemeKind::MalVisA:
        g = classbyte_green(classify_byte(data[x]));
        break;
      default:
        break;
    }
    pixels[x] = Rgb{quantize(rb.red), quantize(g), quantize(rb.blue)};
  }
  return pixels;
}

RgbImage reshape(std::vector<Rgb> pixels, std::uint32_t fixed_width) {
  if (pixels.empty()) {
    raise(ErrorCode::EmptyInput, "cannot reshape an empty pixel sequence");
  }
  if (fixed_width == 0) {
    raise(ErrorCode::DegenerateDimensions, "reshape width must be >= 1");
  }
  const std::size_t count = pixels.size();
  const std::uint32_t height =
      static_cast<std::uint32_t>((count + fixed_width - 1) / fixed_width);
  pixels.resize(static_cast<std::size_t>(fixed_width) * height, Rgb{0, 0, 0});
  return RgbImage{fixed_width, height, std::move(pixels)};
}

RgbImage resize_nn(const RgbImage& image, std::uint32_t out_width,
                   std::uint32_t out_height) {
  if (image.width == 0 || image.height == 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    raise(ErrorCode::DegenerateDimensions, "source image is degenerate");
  }
  if (out_width == 0 || out_height == 0) {
    raise(ErrorCode::DegenerateDimensions, "output dimensions must be >= 1");
  }
  RgbImage out{out_width, out_height, {}};
  out.pixels.resize(static_cast<std::size_t>(out_width) * out_height);
  for (std::uint32_t dy = 0; dy < out_height; ++dy) {
    const std::uint64_t sy =
        static_cast<std::uint64_t>(dy) * image.height / out_height;
    const Rgb* src_row = image.pixels.data() + sy * image.width;
    Rgb* dst_row = out.pixels.data() + static_cast<std::size_t>(dy) * out_width;
    for (std::uint32_t dx = 0; dx < out_width; ++dx) {
      const std::uint64_t sx =
          static_cast<std::uint64_t>(dx) * image.width / out_width;
      dst_row[dx] = src_row[sx];
    }
  }
  return out;
}

}  // namespace malvis
