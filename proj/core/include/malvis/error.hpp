// Error taxonomy shared across the malvis library.
#pragma once

#include <stdexcept>
#include <string>

namespace malvis {

enum class ErrorCode {
  // archive / input ingestion
  NotAZipArchive,
  NoDexEntry,
  DecompressionFailure,
  BadMagic,
  TruncatedFile,
  // encoding pipeline
  EmptyWindow,
  IndexOutOfRange,
  DomainError,
  EmptyInput,
  DegenerateDimensions,
  RegionOutOfRange,
  // predictions / evaluation
  FormatError,
  RowNotNormalized,
  InconsistentK,
  AlignmentError,
  MissingRankSource,
  NotTrained,
  DimensionMismatch,
  MissingProbabilities,
  // dataset manifests
  EmptyDataset,
  DuplicatePath,
  ClassTooSmall,
  BadFractions,
  TargetExceedsMinority,
  // system
  IoFailure,
};

/// Stable diagnostic name, e.g. "NotAZipArchive".
const char* error_code_name(ErrorCode code) noexcept;

/// CLI exit category: 1 usage, 2 input/data, 3 io.
int exit_category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace malvis
