// Labeled corpus manifests: construction, stratified splits, undersampling.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace malvis {

enum class Split { Unassigned, Train, Val, Test };

const char* split_name(Split split) noexcept;
std::optional<Split> split_from_name(std::string_view name) noexcept;

struct ManifestRecord {
  std::string path;
  std::string label;
  Split split = Split::Unassigned;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

class DatasetManifest {
 public:
  DatasetManifest() = default;
  explicit DatasetManifest(std::vector<ManifestRecord> records)
      : records_(std::move(records)) {}

  const std::vector<ManifestRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::map<std::string, std::size_t> class_counts() const;

 private:
  std::vector<ManifestRecord> records_;
};

/// Scans `root`, whose immediate subdirectories name classes; every file
/// below a class directory becomes one unassigned record. Records are
/// ordered lexicographically by path. Throws EmptyDataset and DuplicatePath
/// (two entries resolving to the same canonical file).
DatasetManifest build_manifest(const std::filesystem::path& root);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

/// Per class: seeded shuffle, then contiguous assignment with
/// train = round(f_train*n), val = round(f_val*n) and the remainder to test.
/// With guarantee_nonempty, val and test each receive at least one sample
/// (taken from train). Deterministic per seed. Throws BadFractions (not
/// positive or not summing to 1) and ClassTooSmall (< 3 samples).
DatasetManifest stratified_split(const DatasetManifest& manifest,
                                 SplitFractions fractions, std::uint64_t seed,
                                 bool guarantee_nonempty = false);

/// Reduces every class to `target` records (default: the minority-class
/// count) by seeded uniform sampling without replacement; classes already at
/// or below the target are untouched. Throws TargetExceedsMinority when an
/// explicit target exceeds any class count, EmptyDataset on empty input.
DatasetManifest undersample(const DatasetManifest& manifest, std::uint64_t seed,
                            std::optional<std::size_t> target = std::nullopt);

/// CSV `path,label,split` with a header row.
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);

}  // namespace malvis
