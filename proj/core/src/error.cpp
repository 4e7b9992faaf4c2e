#include "malvis/error.hpp"

namespace malvis {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotAZipArchive: return "NotAZipArchive";
    case ErrorCode::NoDexEntry: return "NoDexEntry";
    case ErrorCode::DecompressionFailure: return "DecompressionFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateDimensions: return "DegenerateDimensions";
    case ErrorCode::RegionOutOfRange: return "RegionOutOfRange";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::RowNotNormalized: return "RowNotNormalized";
    case ErrorCode::InconsistentK: return "InconsistentK";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::MissingRankSource: return "MissingRankSource";
    case ErrorCode::NotTrained: return "NotTrained";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingProbabilities: return "MissingProbabilities";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DuplicatePath: return "DuplicatePath";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::BadFractions: return "BadFractions";
    case ErrorCode::TargetExceedsMinority: return "TargetExceedsMinority";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

int exit_category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadFractions:
    case ErrorCode::MissingRankSource:
    case ErrorCode::MissingProbabilities:
      return 1;  // usage
    case ErrorCode::IoFailure:
      return 3;  // io
    default:
      return 2;  // input / data
  }
}

}  // namespace malvis
