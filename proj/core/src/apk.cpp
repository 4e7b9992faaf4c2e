#include "malvis/apk.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <limits>
#include <optional>

#include "malvis/error.hpp"

namespace malvis {

namespace {

constexpr std::uint32_t kEocdSignature = 0x06054b50;
constexpr std::uint32_t kCentralSignature = 0x02014b50;
constexpr std::uint32_t kLocalSignature = 0x04034b50;
constexpr std::size_t kEocdMinSize = 22;
constexpr std::size_t kMaxCommentLength = 65535;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  return in;
}

std::vector<std::uint8_t> read_at(std::ifstream& in, std::uint64_t offset,
                                  std::size_t count,
                                  const std::filesystem::path& path) {
  std::vector<std::uint8_t> buf(count);
  in.clear();
  in.seekg(static_cast<std::streamoff>(offset));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count));
  if (in.gcount() != static_cast<std::streamsize>(count)) {
    raise(ErrorCode::IoFailure, "short read in " + path.string());
  }
  return buf;
}

std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> compressed,
                                      std::uint64_t expected_size,
                                      const std::string& what) {
  std::vector<std::uint8_t> out(expected_size);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    raise(ErrorCode::DecompressionFailure, "inflateInit failed for " + what);
  }
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::uint64_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected_size) {
    raise(ErrorCode::DecompressionFailure,
          "deflate stream corrupt in " + what + " (rc=" + std::to_string(rc) + ")");
  }
  return out;
}

// Numeric suffix of a multidex entry name: classes.dex -> 0, classesN.dex -> N.
std::optional<std::uint64_t> multidex_rank(const std::string& name) {
  constexpr std::string_view prefix = "classes";
  constexpr std::string_view suffix = ".dex";
  if (name.size() < prefix.size() + suffix.size()) return std::nullopt;
  if (name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
    return std::nullopt;
  }
  const std::string digits =
      name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
  if (digits.empty()) return 0;
  std::uint64_t value = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return value;
}

}  // namespace

ApkArchive open_apk(const std::filesystem::path& path) {
  std::ifstream in = open_binary(path);
  in.seekg(0, std::ios::end);
  const std::uint64_t file_size = static_cast<std::uint64_t>(in.tellg());
  if (file_size < kEocdMinSize) {
    raise(ErrorCode::NotAZipArchive,
          path.string() + ": too small for an end-of-central-directory record");
  }

  // Scan backwards for the EOCD signature; the record may be followed by a
  // comment of up to 64 KiB.
  const std::size_t tail_size = static_cast<std::size_t>(
      std::min<std::uint64_t>(file_size, kEocdMinSize + kMaxCommentLength));
  const std::uint64_t tail_offset = file_size - tail_size;
  const std::vector<std::uint8_t> tail = read_at(in, tail_offset, tail_size, path);

  std::optional<std::size_t> eocd_pos;
  for (std::size_t i = tail_size - kEocdMinSize + 1; i-- > 0;) {
    if (read_u32(tail.data() + i) == kEocdSignature) {
      eocd_pos = i;
      break;
    }
  }
  if (!eocd_pos) {
    raise(ErrorCode::NotAZipArchive,
          path.string() + ": no end-of-central-directory signature");
  }

  const std::uint8_t* eocd = tail.data() + *eocd_pos;
  const std::uint16_t entry_count = read_u16(eocd + 10);
  const std::uint32_t cd_size = read_u32(eocd + 12);
  const std::uint32_t cd_offset = read_u32(eocd + 16);
  if (static_cast<std::uint64_t>(cd_offset) + cd_size > file_size) {
    raise(ErrorCode::NotAZipArchive,
          path.string() + ": central directory extends past end of file");
  }

  const std::vector<std::uint8_t> cd = read_at(in, cd_offset, cd_size, path);
  std::vector<ZipEntry> entries;
  entries.reserve(entry_count);
  std::size_t pos = 0;
  for (std::uint16_t i = 0; i < entry_count; ++i) {
    if (pos + 46 > cd.size() || read_u32(cd.data() + pos) != kCentralSignature) {
      raise(ErrorCode::NotAZipArchive,
            path.string() + ": malformed central directory record");
    }
    const std::uint8_t* rec = cd.data() + pos;
    ZipEntry entry;
    entry.flags = read_u16(rec + 8);
    entry.method = read_u16(rec + 10);
    entry.compressed_size = read_u32(rec + 20);
    entry.uncompressed_size = read_u32(rec + 24);
    const std::uint16_t name_len = read_u16(rec + 28);
    const std::uint16_t extra_len = read_u16(rec + 30);
    const std::uint16_t comment_len = read_u16(rec + 32);
    entry.local_header_offset = read_u32(rec + 42);
    if (pos + 46 + name_len > cd.size()) {
      raise(ErrorCode::NotAZipArchive,
            path.string() + ": truncated central directory entry name");
    }
    entry.name.assign(reinterpret_cast<const char*>(rec + 46), name_len);
    entries.push_back(std::move(entry));
    pos += 46u + name_len + extra_len + comment_len;
  }
  return ApkArchive(path, std::move(entries));
}

ByteStream extract_entry(const ApkArchive& archive, const ZipEntry& entry) {
  const std::string what = archive.source_path().string() + "!" + entry.name;
  if (entry.flags & 0x1) {
    raise(ErrorCode::DecompressionFailure, what + ": encrypted entries unsupported");
  }
  std::ifstream in = open_binary(archive.source_path());
  const std::vector<std::uint8_t> local =
      read_at(in, entry.local_header_offset, 30, archive.source_path());
  if (read_u32(local.data()) != kLocalSignature) {
    raise(ErrorCode::DecompressionFailure, what + ": bad local header signature");
  }
  const std::uint16_t name_len = read_u16(local.data() + 26);
  const std::uint16_t extra_len = read_u16(local.data() + 28);
  const std::uint64_t data_offset =
      entry.local_header_offset + 30u + name_len + extra_len;
  // Sizes come from the central directory, so data-descriptor entries
  // (flag bit 3) extract the same way.
  std::vector<std::uint8_t> compressed =
      read_at(in, data_offset, static_cast<std::size_t>(entry.compressed_size),
              archive.source_path());

  switch (entry.method) {
    case 0:  // stored
      if (entry.compressed_size != entry.uncompressed_size) {
        raise(ErrorCode::DecompressionFailure,
              what + ": stored entry with mismatched sizes");
      }
      return ByteStream(std::move(compressed), what);
    case 8:  // deflate
      return ByteStream(inflate_raw(compressed, entry.uncompressed_size, what), what);
    default:
      raise(ErrorCode::DecompressionFailure,
            what + ": unsupported compression method " + std::to_string(entry.method));
  }
}

ByteStream extract_dex(const ApkArchive& archive, DexPolicy policy) {
  struct Candidate {
    std::uint64_t rank;
    const ZipEntry* entry;
  };
  std::vector<Candidate> candidates;
  for (const ZipEntry& entry : archive.entries()) {
    if (const auto rank = multidex_rank(entry.name)) {
      candidates.push_back({*rank, &entry});
    }
  }

  if (policy == DexPolicy::PrimaryOnly) {
    for (const Candidate& c : candidates) {
      if (c.entry->name == "classes.dex") return extract_entry(archive, *c.entry);
    }
    raise(ErrorCode::NoDexEntry,
          archive.source_path().string() + ": no classes.dex entry");
  }

  if (candidates.empty()) {
    raise(ErrorCode::NoDexEntry,
          archive.source_path().string() + ": no classes*.dex entries");
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.rank < b.rank; });

  std::vector<std::uint8_t> joined;
  for (const Candidate& c : candidates) {
    ByteStream part = extract_entry(archive, *c.entry);
    joined.insert(joined.end(), part.bytes().begin(), part.bytes().end());
  }
  return ByteStream(std::move(joined),
                    archive.source_path().string() + "!multidex(" +
                        std::to_string(candidates.size()) + ")");
}

DexInfo validate_dex_header(const ByteStream& stream) {
  if (stream.size() < 36) {
    raise(ErrorCode::TruncatedFile,
          stream.origin() + ": " + std::to_string(stream.size()) +
              " bytes, need >= 36 for a DEX header");
  }
  DexInfo info;
  std::memcpy(info.magic.data(), stream.bytes().data(), 8);
  const bool magic_ok =
      info.magic[0] == 'd' && info.magic[1] == 'e' && info.magic[2] == 'x' &&
      info.magic[3] == '\n' && info.magic[4] == '0' &&
      std::isdigit(info.magic[5]) && std::isdigit(info.magic[6]) &&
      info.magic[7] == '\0';
  if (!magic_ok) {
    raise(ErrorCode::BadMagic, stream.origin() + ": not a DEX header");
  }
  info.version.assign(reinterpret_cast<const char*>(info.magic.data() + 4), 3);
  info.declared_file_size = read_u32(stream.bytes().data() + 32);
  return info;
}

ByteStream read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in = open_binary(path);
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (in.gcount() != size) {
    raise(ErrorCode::IoFailure, "short read in " + path.string());
  }
  return ByteStream(std::move(bytes), path.string());
}

ByteStream load_input(const std::filesystem::path& path, const LoadOptions& options) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  ByteStream stream = (ext == ".apk" || ext == ".zip")
                          ? extract_dex(open_apk(path), options.policy)
                          : read_file_bytes(path);
  if (options.validate) {
    validate_dex_header(stream);
  }
  return stream;
}

}  // namespace malvis
