// Bi-gram and Classbyte green-channel encoders.
#pragma once

#include <cstdint>

#include "malvis/bytes.hpp"

namespace malvis {

/// Four-way byte taxonomy used by the Classbyte green channel.
enum class ByteClass {
  NullByte,
  NonPrintableAscii,
  PrintableAscii,
  HighByte,
};

/// Combines two consecutive bytes into b1 * 2^8 + b2, in [0, 65535].
constexpr int bigram_value(std::uint8_t b1, std::uint8_t b2) noexcept {
  return (static_cast<int>(b1) << 8) + static_cast<int>(b2);
}

/// Bi-gram green intensity at a byte position, normalized to [0,1] by the
/// maximum bi-gram value 65535. The final byte of a stream has no successor
/// and maps to 0. Throws IndexOutOfRange when index >= data length.
double green_at(const ByteStream& data, std::size_t index);

/// Total classification: 0x00 null, 0x20-0x7E printable ASCII,
/// 0x01-0x1F and 0x7F non-printable ASCII, 0x80-0xFF high bytes.
constexpr ByteClass classify_byte(std::uint8_t b) noexcept {
  if (b == 0x00) return ByteClass::NullByte;
  if (b >= 0x80) return ByteClass::HighByte;
  if (b >= 0x20 && b <= 0x7E) return ByteClass::PrintableAscii;
  return ByteClass::NonPrintableAscii;
}

/// Green shade per byte class, one of {0, 85, 170, 255}/255, ordered by
/// information density: null < control < printable < high/binary.
constexpr double classbyte_green(ByteClass c) noexcept {
  switch (c) {
    case ByteClass::NullByte: return 0.0;
    case ByteClass::NonPrintableAscii: return 85.0 / 255.0;
    case ByteClass::PrintableAscii: return 170.0 / 255.0;
    case ByteClass::HighByte: return 1.0;
  }
  return 0.0;
}

}  // namespace malvis
