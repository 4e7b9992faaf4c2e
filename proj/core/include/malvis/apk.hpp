// APK (ZIP) ingestion: entry enumeration, DEX extraction, header validation.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "malvis/bytes.hpp"

namespace malvis {

struct ZipEntry {
  std::string name;
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint16_t method = 0;  // 0 stored, 8 deflate
  std::uint16_t flags = 0;
  std::uint64_t local_header_offset = 0;
};

/// Parsed ZIP central directory. Entry bodies are not decompressed until
/// extraction; archives are immutable and safe to share across workers.
class ApkArchive {
 public:
  ApkArchive() = default;
  ApkArchive(std::filesystem::path source, std::vector<ZipEntry> entries)
      : source_path_(std::move(source)), entries_(std::move(entries)) {}

  const std::filesystem::path& source_path() const noexcept { return source_path_; }
  std::span<const ZipEntry> entries() const noexcept { return entries_; }

 private:
  std::filesystem::path source_path_;
  std::vector<ZipEntry> entries_;
};

enum class DexPolicy {
  PrimaryOnly,          // the entry named exactly "classes.dex"
  ConcatenateMultidex,  // classes.dex, classes2.dex, ... joined in suffix order
};

struct DexInfo {
  std::array<std::uint8_t, 8> magic{};
  std::uint32_t declared_file_size = 0;  // header offset 32
  std::string version;                   // e.g. "035"
};

/// Enumerates the archive's central directory without decompressing bodies.
/// Throws NotAZipArchive when no end-of-central-directory record is found,
/// IoFailure on read errors.
ApkArchive open_apk(const std::filesystem::path& path);

/// Decompresses the DEX payload selected by policy. Multidex entries sort by
/// numeric suffix with the unsuffixed classes.dex first. Throws NoDexEntry
/// and DecompressionFailure.
ByteStream extract_dex(const ApkArchive& archive,
                       DexPolicy policy = DexPolicy::PrimaryOnly);

/// Decompresses one named entry.
ByteStream extract_entry(const ApkArchive& archive, const ZipEntry& entry);

/// Checks the 8-byte magic `dex\n0NN\0` (NN decimal digits) and reads the
/// declared file size. Never touches bytes past offset 36.
/// Throws TruncatedFile (length < 36) and BadMagic.
DexInfo validate_dex_header(const ByteStream& stream);

/// Whole-file read with provenance. Throws IoFailure.
ByteStream read_file_bytes(const std::filesystem::path& path);

struct LoadOptions {
  DexPolicy policy = DexPolicy::PrimaryOnly;
  bool validate = true;  // gate streams on the DEX magic check
};

/// Ingests an encoder input: .apk/.zip files go through the archive path,
/// anything else is read as raw bytes. When options.validate is set the
/// resulting stream must carry a valid DEX header.
ByteStream load_input(const std::filesystem::path& path,
                      const LoadOptions& options = {});

}  // namespace malvis
