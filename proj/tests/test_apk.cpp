#include <doctest.h>

#include <fstream>
#include <functional>

#include "malvis/apk.hpp"
#include "malvis/error.hpp"
#include "support/fixtures.hpp"
#include "support/zip_builder.hpp"

using namespace malvis;
using namespace malvis::testing;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a malvis::Error");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("open_apk enumerates entries without extraction") {
  TempDir dir;
  const std::vector<std::uint8_t> dex = synthetic_dex(patterned_bytes(500, 7));
  write_file(dir / "app.apk",
             build_zip({{"classes.dex", dex, ZipMethod::Deflated},
                        {"AndroidManifest.xml",
                         {'<', 'm', 'a', 'n', 'i', 'f', 'e', 's', 't', '>'},
                         ZipMethod::Stored}}));

  const ApkArchive archive = open_apk(dir / "app.apk");
  REQUIRE(archive.entries().size() == 2);
  CHECK(archive.entries()[0].name == "classes.dex");
  CHECK(archive.entries()[0].uncompressed_size == dex.size());
  CHECK(archive.entries()[1].name == "AndroidManifest.xml");
}

TEST_CASE("open_apk accepts empty archives and zip comments") {
  TempDir dir;
  write_file(dir / "empty.zip", build_zip({}));
  CHECK(open_apk(dir / "empty.zip").entries().empty());

  write_file(dir / "comment.zip",
             build_zip({{"classes.dex", {1, 2, 3}, ZipMethod::Stored}},
                       "trailing archive comment"));
  CHECK(open_apk(dir / "comment.zip").entries().size() == 1);
}

TEST_CASE("open_apk rejects non-zip files") {
  TempDir dir;
  std::ofstream(dir / "notzip.apk") << "this is just text pretending to be an apk";
  CHECK(code_of([&] { open_apk(dir / "notzip.apk"); }) ==
        ErrorCode::NotAZipArchive);
  CHECK(code_of([&] { open_apk(dir / "absent.apk"); }) == ErrorCode::IoFailure);
}

TEST_CASE("extraction round-trips entry bytes exactly") {
  TempDir dir;
  for (const ZipMethod method : {ZipMethod::Stored, ZipMethod::Deflated}) {
    const std::vector<std::uint8_t> payload =
        random_bytes(4096, method == ZipMethod::Stored ? 1 : 2);
    write_file(dir / "one.apk", build_zip({{"classes.dex", payload, method}}));
    const ByteStream out = extract_dex(open_apk(dir / "one.apk"));
    CHECK(out.bytes() == payload);
  }
}

TEST_CASE("extract_dex multidex policies") {
  TempDir dir;
  const std::vector<std::uint8_t> first(100, 0xA1);
  const std::vector<std::uint8_t> second(50, 0xB2);
  // Deliberately listed out of order in the archive.
  write_file(dir / "multi.apk",
             build_zip({{"classes2.dex", second, ZipMethod::Stored},
                        {"classes.dex", first, ZipMethod::Deflated},
                        {"resources.arsc", {0, 1}, ZipMethod::Stored}}));
  const ApkArchive archive = open_apk(dir / "multi.apk");

  const ByteStream primary = extract_dex(archive, DexPolicy::PrimaryOnly);
  CHECK(primary.bytes() == first);

  const ByteStream joined = extract_dex(archive, DexPolicy::ConcatenateMultidex);
  REQUIRE(joined.size() == 150);
  std::vector<std::uint8_t> expected = first;
  expected.insert(expected.end(), second.begin(), second.end());
  CHECK(joined.bytes() == expected);

  // Determinism: repeated extraction yields the same stream.
  CHECK(extract_dex(archive, DexPolicy::ConcatenateMultidex).bytes() ==
        joined.bytes());
}

TEST_CASE("extract_dex reports missing entries") {
  TempDir dir;
  write_file(dir / "nodex.apk",
             build_zip({{"assets/readme.txt", {'h', 'i'}, ZipMethod::Stored}}));
  const ApkArchive archive = open_apk(dir / "nodex.apk");
  CHECK(code_of([&] { extract_dex(archive); }) == ErrorCode::NoDexEntry);
  CHECK(code_of([&] { extract_dex(archive, DexPolicy::ConcatenateMultidex); }) ==
        ErrorCode::NoDexEntry);
}

TEST_CASE("validate_dex_header checks magic and length") {
  const ByteStream good(synthetic_dex(patterned_bytes(100, 3)), "good");
  const DexInfo info = validate_dex_header(good);
  CHECK(info.version == "035");
  CHECK(info.declared_file_size == 136);
  CHECK(info.magic[0] == 'd');
  CHECK(info.magic[7] == '\0');

  ByteStream zip_sig(std::vector<std::uint8_t>{0x50, 0x4B, 0x03, 0x04}, "zip");
  CHECK(code_of([&] { validate_dex_header(zip_sig); }) == ErrorCode::TruncatedFile);

  std::vector<std::uint8_t> padded{0x50, 0x4B, 0x03, 0x04};
  padded.resize(64, 0);
  ByteStream not_dex(std::move(padded), "zipsig");
  CHECK(code_of([&] { validate_dex_header(not_dex); }) == ErrorCode::BadMagic);

  ByteStream tiny(std::vector<std::uint8_t>(10, 0x64), "tiny");
  CHECK(code_of([&] { validate_dex_header(tiny); }) == ErrorCode::TruncatedFile);
}

TEST_CASE("load_input dispatches on extension and gates on magic") {
  TempDir dir;
  const std::vector<std::uint8_t> dex = synthetic_dex(patterned_bytes(256, 5));
  write_file(dir / "raw.dex", dex);
  CHECK(load_input(dir / "raw.dex").bytes() == dex);

  write_file(dir / "app.apk", build_zip({{"classes.dex", dex, ZipMethod::Deflated}}));
  CHECK(load_input(dir / "app.apk").bytes() == dex);

  write_file(dir / "junk.bin", patterned_bytes(100, 9));
  CHECK(code_of([&] { load_input(dir / "junk.bin"); }) == ErrorCode::BadMagic);
  LoadOptions relaxed;
  relaxed.validate = false;
  CHECK(load_input(dir / "junk.bin", relaxed).size() == 100);
}
