#pragma once

#include <stdexcept>
#include <string>

namespace rh {

enum class ErrorCode {
  NonFphtPlane,
  BehindCamera,
  DegenerateLine,
  SingularReference,
  NonPositiveDisparity,
  InvalidArgument,
  MalformedHeader,
  TruncatedData,
  UnsupportedChannels,
  OutOfBounds,
  OddDimensions,
  DimensionMismatch,
  InsufficientOverlap,
  EmptyGroundTruth,
  IoFailure,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it to an exit status and tests can assert on the exact kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFphtPlane: return "NonFphtPlane";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::DegenerateLine: return "DegenerateLine";
    case ErrorCode::SingularReference: return "SingularReference";
    case ErrorCode::NonPositiveDisparity: return "NonPositiveDisparity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedChannels: return "UnsupportedChannels";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::OddDimensions: return "OddDimensions";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace rh
