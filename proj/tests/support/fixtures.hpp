// Shared test fixtures: temp directories and synthetic DEX payloads.
#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace malvis::testing {

/// Unique directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "malvis") {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> random_bytes(std::size_t count, std::uint64_t seed) {
  std::vector<std::uint8_t> out(count);
  std::mt19937_64 engine(seed);
  std::size_t i = 0;
  while (i < count) {
    std::uint64_t word = engine();
    for (int b = 0; b < 8 && i < count; ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word & 0xFF);
      word >>= 8;
    }
  }
  return out;
}

/// Body bytes cycle over `period` distinct values; low-diversity filler that
/// keeps window entropy at log2(period) once windows are full.
inline std::vector<std::uint8_t> patterned_bytes(std::size_t count,
                                                 unsigned period) {
  std::vector<std::uint8_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = static_cast<std::uint8_t>(i % period);
  }
  return out;
}

/// Minimal stream that satisfies the DEX magic check: dex\n035\0 followed by
/// header filler (declared size at offset 32) and the given body.
inline std::vector<std::uint8_t> synthetic_dex(std::vector<std::uint8_t> body) {
  static constexpr std::uint8_t kMagic[8] = {'d', 'e', 'x', '\n',
                                             '0', '3', '5', '\0'};
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  out.resize(36, 0);
  const std::uint32_t total = static_cast<std::uint32_t>(36 + body.size());
  out[32] = static_cast<std::uint8_t>(total & 0xFF);
  out[33] = static_cast<std::uint8_t>((total >> 8) & 0xFF);
  out[34] = static_cast<std::uint8_t>((total >> 16) & 0xFF);
  out[35] = static_cast<std::uint8_t>((total >> 24) & 0xFF);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

}  // namespace malvis::testing
