// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace corridor {

/// Invalid model parameter (q <= 1, m <= 0, N = 0, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a function (d <= 0, xI > x0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Violated call contract, e.g. asking for a Laplace derivative of order >= m.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Adaptive quadrature did not reach the requested tolerance.
///
/// Carries the best estimate so callers may decide to accept it. `level`
/// names the nesting level that failed ("inner", "middle", "outer") or is
/// empty for a plain one-dimensional integral.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate,
                std::string level = {})
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_estimate_(error_estimate),
        level_(std::move(level)) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }
  const std::string& level() const noexcept { return level_; }

 private:
  double best_estimate_;
  double error_estimate_;
  std::string level_;
};

/// Association requested on a realization with no UAVs.
class EmptyNetworkError : public std::runtime_error {
 public:
  EmptyNetworkError() : std::runtime_error("network realization is empty") {}
};

/// Malformed trace input or a position that cannot be mapped onto the trace.
class TraceError : public std::runtime_error {
 public:
  explicit TraceError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  /// 1-based line number in the source file, 0 when not file related.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few data points for the requested estimate.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace corridor
