#include "common/error.hpp"

namespace agiqa {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kMagic: return "bad magic";
    case ErrorCode::kVersion: return "unsupported version";
    case ErrorCode::kChecksum: return "checksum mismatch";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kPartialFeature: return "partial feature";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kState: return "state error";
    case ErrorCode::kDegenerateWeights: return "degenerate weights";
    case ErrorCode::kUndefinedCorrelation: return "undefined correlation";
    case ErrorCode::kCompatibility: return "compatibility error";
    case ErrorCode::kTooSmall: return "too small";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kManifest: return "manifest error";
  }
  return "unknown error";
}

}  // namespace agiqa
