#include "wazobia/error.h"

namespace wazobia {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadLanguage: return "BAD_LANGUAGE";
    case ErrorCode::kBadLabel: return "BAD_LABEL";
    case ErrorCode::kOverlappingSpans: return "OVERLAPPING_SPANS";
    case ErrorCode::kPositionOutOfRange: return "POSITION_OUT_OF_RANGE";
    case ErrorCode::kEmptyCorpus: return "EMPTY_CORPUS";
    case ErrorCode::kEmptySequence: return "EMPTY_SEQUENCE";
    case ErrorCode::kLengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::kNonfiniteLoss: return "NONFINITE_LOSS";
    case ErrorCode::kBadFormat: return "BAD_FORMAT";
    case ErrorCode::kEmptyFile: return "EMPTY_FILE";
    case ErrorCode::kBadTag: return "BAD_TAG";
    case ErrorCode::kBadLine: return "BAD_LINE";
    case ErrorCode::kCorpusTooSmall: return "CORPUS_TOO_SMALL";
    case ErrorCode::kDomain: return "DOMAIN";
    case ErrorCode::kEmptyHistory: return "EMPTY_HISTORY";
    case ErrorCode::kBadVersion: return "BAD_VERSION";
    case ErrorCode::kCorruptFile: return "CORRUPT_FILE";
    case ErrorCode::kIo: return "IO_ERROR";
    case ErrorCode::kRunInProgress: return "RUN_IN_PROGRESS";
    case ErrorCode::kUnknownRun: return "UNKNOWN_RUN";
    case ErrorCode::kUnknownModel: return "UNKNOWN_MODEL";
    case ErrorCode::kUnknownRecord: return "UNKNOWN_RECORD";
    case ErrorCode::kOcrUnavailable: return "OCR_UNAVAILABLE";
    case ErrorCode::kOcrFailed: return "OCR_FAILED";
    case ErrorCode::kFileNotFound: return "FILE_NOT_FOUND";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
  }
  return "UNKNOWN";
}

}  // namespace wazobia
