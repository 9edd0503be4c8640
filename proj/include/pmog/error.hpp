#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pmog {

enum class ErrorCode {
  InvalidArgument,
  NumericalUnderflow,
  DegenerateSample,
  EmptyComponent,
  SolveFailed,
  DegenerateSpectrum,
  SingularCovariance,
  SingularCorrelation,
  ConstantRow,
  ZeroVariance,
  NotConverged,
  ExtractionFailed,
  IoError,
  ImageFormatError,
  SizeMismatch,
  ShapeMismatch,
  UsageError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (EM restarts, the CLI exit-code mapping) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace pmog
