#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace agiqa {

// Mirrors agiqa_status in the C header; values must stay in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kShape = 2,
  kConfig = 3,
  kIo = 4,
  kFormat = 5,
  kMagic = 6,
  kVersion = 7,
  kChecksum = 8,
  kNotFound = 9,
  kPartialFeature = 10,
  kConflict = 11,
  kNumeric = 12,
  kState = 13,
  kDegenerateWeights = 14,
  kUndefinedCorrelation = 15,
  kCompatibility = 16,
  kTooSmall = 17,
  kEmptyInput = 18,
  kManifest = 19,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> byte_offset = std::nullopt)
      : std::runtime_error(message), code_(code), byte_offset_(byte_offset) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> byte_offset() const noexcept { return byte_offset_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> byte_offset_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

[[noreturn]] inline void fail_at(ErrorCode code, std::uint64_t offset,
                                 const std::string& message) {
  throw Error(code, message + " (at byte offset " + std::to_string(offset) + ")",
              offset);
}

}  // namespace agiqa
