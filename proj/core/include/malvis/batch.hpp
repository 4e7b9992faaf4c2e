// Corpus-scale encoding: a worker pool over independent per-file pipelines.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "malvis/encode.hpp"

namespace malvis {

struct BatchOptions {
  EncodeOptions encode{};
  unsigned workers = 0;  // 0 = hardware concurrency
};

struct BatchFileResult {
  std::string input;
  std::string status;  // "ok" or an error-code name
  std::string output;  // empty on failure
  std::uint64_t input_bytes = 0;
  double elapsed_ms = 0.0;
};

struct BatchSummary {
  std::vector<BatchFileResult> results;  // one per input, in input order
  std::size_t failures = 0;
};

/// Encodes every input into out_dir under the name
/// `<sha256-of-input-bytes>.<scheme>.png`. Per-file failures are recorded,
/// never fatal; outputs are identical for any worker count.
BatchSummary encode_batch(const std::vector<std::string>& inputs,
                          const std::filesystem::path& out_dir,
                          const BatchOptions& options);

/// CSV report: input_path,status,output_path,input_bytes,elapsed_ms.
void write_batch_report(const BatchSummary& summary,
                        const std::filesystem::path& path);

}  // namespace malvis
