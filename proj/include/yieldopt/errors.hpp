#pragma once

#include <stdexcept>
#include <string>

namespace yieldopt {

/// Invalid sizes, non-SPD covariances, bad steps or tolerances.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model was asked to evaluate outside its physical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The truncation box rejects almost every Gaussian proposal.
class DegenerateTruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel matrix could not be factorized even with the largest jitter.
class SurrogateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace yieldopt
