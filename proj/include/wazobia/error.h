#ifndef WAZOBIA_ERROR_H_
#define WAZOBIA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace wazobia {

enum class ErrorCode {
  kBadLanguage,
  kBadLabel,
  kOverlappingSpans,
  kPositionOutOfRange,
  kEmptyCorpus,
  kEmptySequence,
  kLengthMismatch,
  kNonfiniteLoss,
  kBadFormat,
  kEmptyFile,
  kBadTag,
  kBadLine,
  kCorpusTooSmall,
  kDomain,
  kEmptyHistory,
  kBadVersion,
  kCorruptFile,
  kIo,
  kRunInProgress,
  kUnknownRun,
  kUnknownModel,
  kUnknownRecord,
  kOcrUnavailable,
  kOcrFailed,
  kFileNotFound,
  kInvalidArgument,
};

// Stable machine name, e.g. "EMPTY_SEQUENCE". These strings are part of the
// HTTP error contract.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace wazobia

#endif  // WAZOBIA_ERROR_H_
