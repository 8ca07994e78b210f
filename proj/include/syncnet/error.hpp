#pragma once

#include <stdexcept>
#include <string>

namespace syncnet {

enum class ErrorKind {
  InvalidArgument,
  SingularMatrix,
  NotSymmetric,
  NoConvergence,
  NotMetzler,
  RowSumNonZero,
  AllGainsZero,
  NotStronglyConnected,
  NotInKernel,
  NotNegativeDefinite,
  NotPositive,
  NonFiniteState,
  Diverged,
  Parse,
};

[[nodiscard]] constexpr const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotMetzler: return "NotMetzler";
    case ErrorKind::RowSumNonZero: return "RowSumNonZero";
    case ErrorKind::AllGainsZero: return "AllGainsZero";
    case ErrorKind::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorKind::NotInKernel: return "NotInKernel";
    case ErrorKind::NotNegativeDefinite: return "NotNegativeDefinite";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Library-wide exception carrying a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the integrator when the divergence guard trips.
class DivergedError : public Error {
 public:
  DivergedError(double time, const std::string& what)
      : Error(ErrorKind::Diverged, what + " at t=" + std::to_string(time)), time_(time) {}

  [[nodiscard]] double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace syncnet
