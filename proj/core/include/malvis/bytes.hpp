#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace malvis {

/// Immutable byte payload with a provenance label (a file path or an archive
/// entry name). All encoders consume this type; it is safe to share across
/// threads once constructed.
class ByteStream {
 public:
  ByteStream() = default;
  ByteStream(std::vector<std::uint8_t> bytes, std::string origin)
      : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  std::span<const std::uint8_t> view() const noexcept { return bytes_; }
  const std::string& origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return bytes_.size(); }
  bool empty() const noexcept { return bytes_.empty(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return bytes_[i]; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::string origin_;
};

}  // namespace malvis
