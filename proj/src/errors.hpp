#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vaxeq {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Precondition violation: bad argument value, mismatched grids, out-of-range time.
class DomainError : public Error {
public:
  using Error::Error;
};

// Scenario text could not be parsed or does not match the schema.
class ScenarioError : public Error {
public:
  using Error::Error;
};

// Model failed the construction-time validity checks.
class ValidationError : public Error {
public:
  explicit ValidationError(std::string msg, std::vector<std::string> issues = {})
      : Error(std::move(msg)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
  std::vector<std::string> issues_;
};

// A slice solve that could not be certified; carries the best iterate found.
class SolveError : public Error {
public:
  SolveError(std::string msg, std::vector<double> best, double residual)
      : Error(std::move(msg)), best_(std::move(best)), residual_(residual) {}
  const std::vector<double>& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

private:
  std::vector<double> best_;
  double residual_;
};

// Multiplier extraction refused: the active-set sign conditions do not hold,
// so the reconstructed multipliers would be negative.
class ExtractionError : public Error {
public:
  using Error::Error;
};

// Best-response iteration failed to settle.
class OracleError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace vaxeq
