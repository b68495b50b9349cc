#pragma once

#include <stdexcept>
#include <string>

namespace mrx {

enum class ErrorKind {
  spec_mismatch,
  division_by_zero,
  singular_matrix,
  domain,
  resource_limit,
  unsupported,
  convergence,
  normality_required,
  missing_spectrum,
  unknown_theorem,
  usage,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::spec_mismatch: return "spec-mismatch";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::singular_matrix: return "singular-matrix";
    case ErrorKind::domain: return "domain";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::normality_required: return "normality-required";
    case ErrorKind::missing_spectrum: return "missing-spectrum";
    case ErrorKind::unknown_theorem: return "unknown-theorem";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

/// Every failure raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an iterative solver hits its cap; carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorKind::convergence, what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace mrx
