#include "tlc/errors.hpp"

namespace tlc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "Usage";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidGroupCount: return "InvalidGroupCount";
    case ErrorCode::kEmptyWindowSample: return "EmptyWindowSample";
    case ErrorCode::kOpShapeViolation: return "OpShapeViolation";
    case ErrorCode::kPatchTooLarge: return "PatchTooLarge";
    case ErrorCode::kDegenerateScale: return "DegenerateScale";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kPropertyFailure: return "PropertyFailure";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage:
      return 1;
    case ErrorCode::kIoFailure:
      return 2;
    case ErrorCode::kPropertyFailure:
      return 4;
    default:
      return 3;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace tlc
