#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace invlat {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  /// Short machine-readable tag used in CLI error reports.
  virtual const char* kind() const noexcept { return "Error"; }
};

/// Caller supplied data that violates a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "InvalidInput"; }
};

class SymmetryViolation : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
  const char* kind() const noexcept override { return "SymmetryViolation"; }
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
  const char* kind() const noexcept override { return "DimensionMismatch"; }
};

class SizeLimit : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
  const char* kind() const noexcept override { return "SizeLimit"; }
};

class DegenerateTarget : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
  const char* kind() const noexcept override { return "DegenerateTarget"; }
};

class ResolutionTooCoarse : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
  const char* kind() const noexcept override { return "ResolutionTooCoarse"; }
};

class DisconnectedDomain : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
  const char* kind() const noexcept override { return "DisconnectedDomain"; }
};

class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : InvalidInput(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  const char* kind() const noexcept override { return "ConfigError"; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Iterative solver exhausted its restart budget.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  const char* kind() const noexcept override { return "NoConvergence"; }
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Pinned couplings leave no point of the isospectral surface. Either proven
/// (trace budget exceeded) or inferred from a persistent residual floor.
class InfeasiblePins : public Error {
 public:
  InfeasiblePins(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  const char* kind() const noexcept override { return "InfeasiblePins"; }
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class ZeroDivision : public Error {
 public:
  ZeroDivision(const std::string& what, std::size_t index) : Error(what), index_(index) {}
  const char* kind() const noexcept override { return "ZeroDivision"; }
  /// 1-based site index of the vanishing component.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NotAnEigenvector : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NotAnEigenvector"; }
};

class NegativeDiagonal : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "NegativeDiagonal"; }
};

class WindowViolation : public Error {
 public:
  WindowViolation(const std::string& what, double max_scale) : Error(what), max_scale_(max_scale) {}
  const char* kind() const noexcept override { return "WindowViolation"; }
  /// Largest energy scale for which every segment stays above d_min.
  double max_scale() const noexcept { return max_scale_; }

 private:
  double max_scale_;
};

class SelfIntersection : public Error {
 public:
  SelfIntersection(const std::string& what, std::size_t first, std::size_t second)
      : Error(what), first_(first), second_(second) {}
  const char* kind() const noexcept override { return "SelfIntersection"; }
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const char* kind() const noexcept override { return "ConvergenceFailure"; }
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class FewerThanTwoBoundStates : public Error {
 public:
  FewerThanTwoBoundStates(const std::string& what, double level) : Error(what), level_(level) {}
  const char* kind() const noexcept override { return "FewerThanTwoBoundStates"; }
  double level() const noexcept { return level_; }

 private:
  double level_;
};

}  // namespace invlat
