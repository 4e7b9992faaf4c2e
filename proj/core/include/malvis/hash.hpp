#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace malvis {

/// Lowercase hex SHA-256 digest; used for deduplicating batch output names.
std::string sha256_hex(std::span<const std::uint8_t> data);

}  // namespace malvis
