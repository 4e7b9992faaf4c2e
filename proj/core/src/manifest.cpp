#include "malvis/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "csv.hpp"
#include "malvis/error.hpp"

namespace malvis {

const char* split_name(Split split) noexcept {
  switch (split) {
    case Split::Unassigned: return "unassigned";
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "unassigned";
}

std::optional<Split> split_from_name(std::string_view name) noexcept {
  if (name == "unassigned") return Split::Unassigned;
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  return std::nullopt;
}

std::map<std::string, std::size_t> DatasetManifest::class_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const ManifestRecord& r : records_) ++counts[r.label];
  return counts;
}

namespace {

// Portable Fisher-Yates: rejection-sampled bounds over raw engine output so
// sequences do not depend on the standard library's distribution internals.
std::uint64_t bounded_rand(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t value;
  do {
    value = engine();
  } while (value >= limit);
  return value % bound;
}

template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded_rand(engine, i));
    std::swap(items[i - 1], items[j]);
  }
}

// Class label -> indices into the record vector, labels in sorted order.
std::map<std::string, std::vector<std::size_t>> group_by_class(
    const std::vector<ManifestRecord>& records) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    groups[records[i].label].push_back(i);
  }
  return groups;
}

}  // namespace

DatasetManifest build_manifest(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    raise(ErrorCode::IoFailure, root.string() + " is not a directory");
  }

  std::vector<ManifestRecord> records;
  std::set<std::string> canonical_seen;
  std::vector<fs::path> class_dirs;
  for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());

  for (const fs::path& class_dir : class_dirs) {
    const std::string label = class_dir.filename().string();
    for (const fs::directory_entry& entry :
         fs::recursive_directory_iterator(class_dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string canonical = fs::weakly_canonical(entry.path()).string();
      if (!canonical_seen.insert(canonical).second) {
        raise(ErrorCode::DuplicatePath,
              entry.path().string() + " resolves to already-seen " + canonical);
      }
      records.push_back({entry.path().string(), label, Split::Unassigned});
    }
  }
  if (records.empty()) {
    raise(ErrorCode::EmptyDataset, root.string() + " contains no class files");
  }
  std::sort(records.begin(), records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) {
              return a.path < b.path;
            });
  return DatasetManifest(std::move(records));
}

DatasetManifest stratified_split(const DatasetManifest& manifest,
                                 SplitFractions fractions, std::uint64_t seed,
                                 bool guarantee_nonempty) {
  if (!(fractions.train > 0.0 && fractions.val > 0.0 && fractions.test > 0.0)) {
    raise(ErrorCode::BadFractions, "fractions must be positive");
  }
  if (std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    raise(ErrorCode::BadFractions, "fractions must sum to 1");
  }
  if (manifest.size() == 0) {
    raise(ErrorCode::EmptyDataset, "cannot split an empty manifest");
  }

  std::vector<ManifestRecord> records = manifest.records();
  std::mt19937_64 engine(seed);
  for (auto& [label, indices] : group_by_class(records)) {
    const std::size_t n = indices.size();
    if (n < 3) {
      raise(ErrorCode::ClassTooSmall,
            "class '" + label + "' has " + std::to_string(n) + " samples, need >= 3");
    }
    deterministic_shuffle(indices, engine);

    std::size_t n_train = static_cast<std::size_t>(
        std::llround(fractions.train * static_cast<double>(n)));
    n_train = std::min(n_train, n);
    std::size_t n_val = static_cast<std::size_t>(
        std::llround(fractions.val * static_cast<double>(n)));
    n_val = std::min(n_val, n - n_train);
    std::size_t n_test = n - n_train - n_val;

    if (guarantee_nonempty) {
      while (n_val < 1 && n_train > 1) { --n_train; ++n_val; }
      while (n_test < 1 && n_train > 1) { --n_train; ++n_test; }
    }

    for (std::size_t j = 0; j < n; ++j) {
      Split s = Split::Test;
      if (j < n_train) s = Split::Train;
      else if (j < n_train + n_val) s = Split::Val;
      records[indices[j]].split = s;
    }
  }
  return DatasetManifest(std::move(records));
}

DatasetManifest undersample(const DatasetManifest& manifest, std::uint64_t seed,
                            std::optional<std::size_t> target) {
  if (manifest.size() == 0) {
    raise(ErrorCode::EmptyDataset, "cannot undersample an empty manifest");
  }
  const std::vector<ManifestRecord>& records = manifest.records();
  auto groups = group_by_class(records);

  std::size_t minority = records.size();
  for (const auto& [label, indices] : groups) {
    minority = std::min(minority, indices.size());
  }
  const std::size_t keep_count = target.value_or(minority);
  if (keep_count > minority) {
    raise(ErrorCode::TargetExceedsMinority,
          "target " + std::to_string(keep_count) +
              " exceeds the minority class count " + std::to_string(minority));
  }

  std::vector<bool> keep(records.size(), false);
  std::mt19937_64 engine(seed);
  for (auto& [label, indices] : groups) {
    if (indices.size() <= keep_count) {
      for (std::size_t i : indices) keep[i] = true;
      continue;
    }
    deterministic_shuffle(indices, engine);
    for (std::size_t j = 0; j < keep_count; ++j) keep[indices[j]] = true;
  }

  std::vector<ManifestRecord> kept;
  kept.reserve(keep_count * groups.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) kept.push_back(records[i]);
  }
  return DatasetManifest(std::move(kept));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoFailure, "cannot open " + path.string());
  }
  std::vector<ManifestRecord> records;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("path,", 0) == 0) continue;  // header
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != 3) {
      raise(ErrorCode::FormatError, path.string() + ":" + std::to_string(line_no) +
                                        ": expected path,label,split");
    }
    const auto split = split_from_name(fields[2]);
    if (!split) {
      raise(ErrorCode::FormatError, path.string() + ":" + std::to_string(line_no) +
                                        ": unknown split '" + fields[2] + "'");
    }
    if (!seen.insert(fields[0]).second) {
      raise(ErrorCode::DuplicatePath,
            path.string() + ":" + std::to_string(line_no) + ": duplicate " + fields[0]);
    }
    records.push_back({fields[0], fields[1], *split});
  }
  if (records.empty()) {
    raise(ErrorCode::EmptyDataset, path.string() + " has no records");
  }
  return DatasetManifest(std::move(records));
}

void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    raise(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << "path,label,split\n";
  for (const ManifestRecord& r : manifest.records()) {
    out << detail::csv_escape(r.path) << ',' << detail::csv_escape(r.label) << ','
        << split_name(r.split) << '\n';
  }
  if (!out.flush()) {
    raise(ErrorCode::IoFailure, "cannot flush " + path.string());
  }
}

}  // namespace malvis
