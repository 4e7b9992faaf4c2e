#include <doctest.h>

#include <cmath>

#include "malvis/encode.hpp"
#include "malvis/entropy.hpp"
#include "malvis/error.hpp"
#include "malvis/image.hpp"
#include "malvis/ngram.hpp"
#include "malvis/png_io.hpp"
#include "support/fixtures.hpp"

using namespace malvis;
using malvis::testing::random_bytes;
using malvis::testing::TempDir;

namespace {

// Per-pixel oracle evaluated independently of the scanner-based encoder.
Rgb oracle_pixel(const ByteStream& data, std::size_t x, const EncodingScheme& scheme) {
  if (scheme.kind == SchemeKind::Grayscale) {
    return Rgb{data[x], data[x], data[x]};
  }
  const double e = normalized_entropy_at(data, x, scheme.entropy);
  const ChannelPair rb = entropy_channels(e);
  double g = 0.0;
  if (scheme.kind == SchemeKind::MalVisB) g = green_at(data, x);
  if (scheme.kind == SchemeKind::MalVisA) {
    g = classbyte_green(classify_byte(data[x]));
  }
  return Rgb{static_cast<std::uint8_t>(static_cast<int>(255.0 * rb.red)),
             static_cast<std::uint8_t>(static_cast<int>(255.0 * g)),
             static_cast<std::uint8_t>(static_cast<int>(255.0 * rb.blue))};
}

}  // namespace

TEST_CASE("encode_pixels worked examples") {
  ByteStream zeros(std::vector<std::uint8_t>(1024, 0x00), "zeros");
  for (const Rgb& p : encode_pixels(zeros, {SchemeKind::MalVisB, {}})) {
    CHECK(p == Rgb{0, 0, 0});
  }

  std::vector<std::uint8_t> distinct(32);
  for (int i = 0; i < 32; ++i) distinct[i] = static_cast<std::uint8_t>(i);
  ByteStream window(std::move(distinct), "window");
  const std::vector<Rgb> pixels = encode_pixels(window, {SchemeKind::MalVisB, {}});
  CHECK(pixels[0].r == 9);   // curve(0.625 - 0.5) quantized
  CHECK(pixels[0].b == 99);  // 0.625^2 quantized
  CHECK(pixels[0].g == 0);   // bigram(0,1) = 1 -> 255/65535 truncates to 0

  ByteStream gray(std::vector<std::uint8_t>{0xC8, 0x00, 0xFF}, "gray");
  const std::vector<Rgb> gp = encode_pixels(gray, {SchemeKind::Grayscale, {}});
  CHECK(gp[0] == Rgb{200, 200, 200});
  CHECK(gp[1] == Rgb{0, 0, 0});
  CHECK(gp[2] == Rgb{255, 255, 255});
}

TEST_CASE("encode_pixels agrees with the per-pixel oracle on every scheme") {
  ByteStream data(random_bytes(700, 42), "oracle");
  for (const SchemeKind kind : {SchemeKind::Grayscale, SchemeKind::EntropyRB,
                                SchemeKind::MalVisA, SchemeKind::MalVisB}) {
    const EncodingScheme scheme{kind, {}};
    const std::vector<Rgb> pixels = encode_pixels(data, scheme);
    REQUIRE(pixels.size() == data.size());
    for (std::size_t x = 0; x < data.size(); ++x) {
      CAPTURE(x);
      CHECK(pixels[x] == oracle_pixel(data, x, scheme));
    }
  }
}

TEST_CASE("encode_pixels properties") {
  ByteStream data(random_bytes(4096, 5), "props");
  const std::vector<Rgb> b = encode_pixels(data, {SchemeKind::MalVisB, {}});
  CHECK(b.back().g == 0);  // last-byte rule
  const std::vector<Rgb> rb = encode_pixels(data, {SchemeKind::EntropyRB, {}});
  for (const Rgb& p : rb) CHECK(p.g == 0);

  CHECK_THROWS_AS(encode_pixels(ByteStream({}, "empty"), {}), Error);
}

TEST_CASE("reshape pads the final row with black") {
  std::vector<Rgb> pixels(1000, Rgb{1, 2, 3});
  const RgbImage image = reshape(pixels);
  CHECK(image.width == 256);
  CHECK(image.height == 4);  // ceil(1000/256)
  CHECK(image.pixels.size() == 1024);
  for (std::size_t i = 1000; i < 1024; ++i) {
    CHECK(image.pixels[i] == Rgb{0, 0, 0});
  }

  CHECK(reshape(std::vector<Rgb>(256, Rgb{9, 9, 9})).height == 1);
  const RgbImage one = reshape(std::vector<Rgb>(1, Rgb{7, 7, 7}));
  CHECK(one.width == 256);
  CHECK(one.height == 1);
  CHECK(one.pixels[0] == Rgb{7, 7, 7});
  CHECK(one.pixels[255] == Rgb{0, 0, 0});

  CHECK_THROWS_AS(reshape({}), Error);
}

TEST_CASE("resize_nn floor-index mapping") {
  const Rgb a{10, 0, 0}, b{0, 10, 0}, c{0, 0, 10}, d{10, 10, 10};
  const RgbImage tiny{2, 2, {a, b, c, d}};
  const RgbImage up = resize_nn(tiny, 4, 4);
  const std::vector<Rgb> expect{a, a, b, b, a, a, b, b, c, c, d, d, c, c, d, d};
  CHECK(up.pixels == expect);

  // Identity at equal dimensions; idempotence of repeated resize.
  CHECK(resize_nn(tiny, 2, 2) == tiny);
  const RgbImage once = resize_nn(tiny, 3, 5);
  CHECK(resize_nn(once, 3, 5) == once);

  // Origin is a fixed point.
  RgbImage strip{256, 4, std::vector<Rgb>(1024)};
  strip.pixels[0] = Rgb{42, 43, 44};
  CHECK(resize_nn(strip, 224, 224).pixels[0] == Rgb{42, 43, 44});

  CHECK_THROWS_AS(resize_nn(tiny, 0, 4), Error);
  CHECK_THROWS_AS(resize_nn(RgbImage{}, 4, 4), Error);
}

TEST_CASE("png round trip preserves every channel octet") {
  TempDir dir;
  ByteStream data(random_bytes(65536, 11), "png");
  const RgbImage image = reshape(encode_pixels(data, {SchemeKind::MalVisB, {}}));
  REQUIRE(image.width == 256);
  REQUIRE(image.height == 256);

  const auto path = dir / "round.png";
  write_png(image, path);
  const RgbImage decoded = read_png(path);
  CHECK(decoded == image);

  const RgbImage dot{1, 1, {Rgb{0, 0, 0}}};
  write_png(dot, dir / "dot.png");
  CHECK(read_png(dir / "dot.png") == dot);

  CHECK_THROWS_AS(write_png(image, dir.path() / "missing" / "out.png"), Error);
  try {
    write_png(image, dir.path() / "missing" / "out.png");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
  }
}

TEST_CASE("encode_stream is deterministic and resizes as asked") {
  ByteStream data(random_bytes(65536, 3), "det");
  EncodeOptions options;
  options.scheme = {SchemeKind::MalVisB, {}};

  const RgbImage first = encode_stream(data, options);
  const RgbImage second = encode_stream(data, options);
  CHECK(first == second);
  CHECK(first.width == 256);
  CHECK(first.height == 256);  // 65536 bytes fill the square exactly

  options.resize = {{224, 224}};
  const RgbImage resized = encode_stream(data, options);
  CHECK(resized.width == 224);
  CHECK(resized.height == 224);
}

TEST_CASE("quantization stays within [0,255] for adversarial streams") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    ByteStream data(random_bytes(2048, seed), "range");
    for (const SchemeKind kind : {SchemeKind::EntropyRB, SchemeKind::MalVisA,
                                  SchemeKind::MalVisB}) {
      for (const Rgb& p : encode_pixels(data, {kind, {}})) {
        // uint8 storage already bounds the value; the cast cannot have wrapped
        // because int(255*v) with v in [0,1] is at most 255.
        CHECK(static_cast<int>(p.r) <= 255);
        CHECK(static_cast<int>(p.b) <= 255);
      }
    }
  }
}
