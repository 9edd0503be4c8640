#include "pmog/error.hpp"

namespace pmog {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::EmptyComponent: return "EmptyComponent";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::SingularCorrelation: return "SingularCorrelation";
    case ErrorCode::ConstantRow: return "ConstantRow";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ExtractionFailed: return "ExtractionFailed";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ImageFormatError: return "ImageFormatError";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace pmog
