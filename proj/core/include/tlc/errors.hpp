#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlc {

enum class ErrorCode {
  kUsage,
  kIoFailure,
  kMalformedHeader,
  kTruncatedPayload,
  kNonFiniteValue,
  kShapeMismatch,
  kInvalidGroupCount,
  kEmptyWindowSample,
  kOpShapeViolation,
  kPatchTooLarge,
  kDegenerateScale,
  kInvalidArgument,
  kPropertyFailure,
};

std::string_view to_string(ErrorCode code);

/// Process exit status for an error category: 1 usage, 2 I/O, 3 data/shape,
/// 4 property-check failure.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tlc
