#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <string>

namespace tetralogit {

// Machine-readable failure categories, mirrored in CLI exit codes and the
// "error.category" field of JSON reports.
enum class ErrorCategory {
  Config,          // bad arguments, spec/family mismatch, contract violations
  InvalidCutoff,   // cutoff outside {1..M}
  TooFewNodes,     // N < 4
  EmptyNetwork,    // no observed dyads
  NoInformation,   // zero informative tetrad-cutoff pairs
  Separation,      // logit likelihood has no finite maximizer
  RankDeficiency,  // singular design / Hessian
  Ingestion,       // malformed input data
  Dgp,             // invalid simulation design
};

const char* to_string(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// Carries the direction along which the likelihood is unbounded.
class SeparationError : public Error {
 public:
  SeparationError(const std::string& message, Eigen::VectorXd direction)
      : Error(ErrorCategory::Separation, message),
        direction_(std::move(direction)) {}
  const Eigen::VectorXd& direction() const { return direction_; }

 private:
  Eigen::VectorXd direction_;
};

// Carries the (approximate) null direction of a singular Hessian or design.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& message, Eigen::VectorXd null_direction)
      : Error(ErrorCategory::RankDeficiency, message),
        null_direction_(std::move(null_direction)) {}
  const Eigen::VectorXd& null_direction() const { return null_direction_; }

 private:
  Eigen::VectorXd null_direction_;
};

}  // namespace tetralogit
