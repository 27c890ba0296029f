#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccare {

enum class ErrorKind {
  kEigenFailure,
  kDimensionMismatch,
  kNotSymmetric,
  kNonFinite,
  kIndexOutOfRange,
  kInvalidArgument,
  kUnstableCoefficient,
  kSingularSystem,
  kNotStabilizable,
  kNotDetectable,
  kSubspaceFailure,
  kNoConvergence,
  kInvariantViolation,
  kPreconditionFailed,
  kSubmoduleError,
  kParseError,
  kUnknownExample,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so
/// callers (notably the CLI exit-code mapping) can dispatch without parsing
/// messages.
class CcareError : public std::runtime_error {
 public:
  CcareError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A failure inside one inner CARE solve of an iteration sweep.
class SubmoduleError : public CcareError {
 public:
  SubmoduleError(int sweep, int mode, const CcareError& cause)
      : CcareError(ErrorKind::kSubmoduleError,
                   "sweep " + std::to_string(sweep) + ", mode " +
                       std::to_string(mode + 1) + ": " + cause.what()),
        sweep_(sweep),
        mode_(mode),
        cause_kind_(cause.kind()) {}

  int sweep() const noexcept { return sweep_; }
  /// Zero-based mode index.
  int mode() const noexcept { return mode_; }
  ErrorKind cause_kind() const noexcept { return cause_kind_; }

 private:
  int sweep_;
  int mode_;
  ErrorKind cause_kind_;
};

}  // namespace ccare
