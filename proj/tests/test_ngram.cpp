#include <doctest.h>

#include <array>
#include <set>

#include "malvis/error.hpp"
#include "malvis/ngram.hpp"
#include "support/fixtures.hpp"

using namespace malvis;
using malvis::testing::random_bytes;

TEST_CASE("bigram_value worked examples") {
  CHECK(bigram_value(0x12, 0x34) == 4660);
  CHECK(bigram_value(0x00, 0x00) == 0);
  CHECK(bigram_value(0xFF, 0xFF) == 65535);
}

TEST_CASE("bigram_value is a bijection onto [0, 65535]") {
  std::vector<bool> seen(65536, false);
  for (int b1 = 0; b1 < 256; ++b1) {
    for (int b2 = 0; b2 < 256; ++b2) {
      const int v = bigram_value(static_cast<std::uint8_t>(b1),
                                 static_cast<std::uint8_t>(b2));
      REQUIRE(v >= 0);
      REQUIRE(v <= 65535);
      REQUIRE_FALSE(seen[static_cast<std::size_t>(v)]);
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
}

TEST_CASE("green_at matches an independent slice oracle") {
  ByteStream data(random_bytes(512, 2024), "green");
  for (std::size_t i = 0; i + 1 < data.size(); ++i) {
    const double oracle =
        (static_cast<double>(data[i]) * 256.0 + static_cast<double>(data[i + 1])) /
        65535.0;
    CHECK(green_at(data, i) == oracle);
    // Quantized agreement at the 8-bit level is exact by construction.
    CHECK(static_cast<int>(255.0 * green_at(data, i)) ==
          static_cast<int>(255.0 * oracle));
  }
}

TEST_CASE("green_at worked examples and the last-byte rule") {
  ByteStream max_pair(std::vector<std::uint8_t>{0xFF, 0xFF}, "max");
  CHECK(green_at(max_pair, 0) == 1.0);

  ByteStream sample(std::vector<std::uint8_t>{0x12, 0x34, 0x00}, "sample");
  CHECK(static_cast<int>(255.0 * green_at(sample, 0)) == 18);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ByteStream data(random_bytes(1 + seed % 64, seed), "tail");
    CHECK(green_at(data, data.size() - 1) == 0.0);
  }

  CHECK_THROWS_AS(green_at(sample, 3), Error);
}

TEST_CASE("classify_byte partitions all 256 values") {
  std::array<int, 4> counts{};
  for (int b = 0; b < 256; ++b) {
    const ByteClass c = classify_byte(static_cast<std::uint8_t>(b));
    ++counts[static_cast<int>(c)];
    if (b == 0x00) CHECK(c == ByteClass::NullByte);
    else if (b >= 0x20 && b <= 0x7E) CHECK(c == ByteClass::PrintableAscii);
    else if (b >= 0x80) CHECK(c == ByteClass::HighByte);
    else CHECK(c == ByteClass::NonPrintableAscii);
  }
  CHECK(counts[static_cast<int>(ByteClass::NullByte)] == 1);
  CHECK(counts[static_cast<int>(ByteClass::PrintableAscii)] == 95);
  CHECK(counts[static_cast<int>(ByteClass::NonPrintableAscii)] == 32);
  CHECK(counts[static_cast<int>(ByteClass::HighByte)] == 128);

  CHECK(classify_byte(0x41) == ByteClass::PrintableAscii);
  CHECK(classify_byte(0x9C) == ByteClass::HighByte);
  CHECK(classify_byte(0x7F) == ByteClass::NonPrintableAscii);
  CHECK(classify_byte(0x1F) == ByteClass::NonPrintableAscii);
}

TEST_CASE("classbyte_green uses four distinct shades") {
  CHECK(classbyte_green(ByteClass::NullByte) == 0.0);
  CHECK(classbyte_green(ByteClass::HighByte) == 1.0);
  CHECK(classbyte_green(ByteClass::PrintableAscii) ==
        doctest::Approx(170.0 / 255.0));

  std::set<int> shades;
  for (const ByteClass c : {ByteClass::NullByte, ByteClass::NonPrintableAscii,
                            ByteClass::PrintableAscii, ByteClass::HighByte}) {
    shades.insert(static_cast<int>(255.0 * classbyte_green(c)));
  }
  CHECK(shades == std::set<int>{0, 85, 170, 255});
}
