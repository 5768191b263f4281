#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cvxlines {

// Invalid parameter or argument outside the mathematical domain of an
// operation (e.g. rho outside (0,1], s >= 1, b_0 != 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A truncated series or lattice sum could not be certified within the
// requested tolerance inside the truncation budget.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation would exceed a configured memory or enumeration budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent input data, e.g. a sampled line that is not in the exact
// support it is compared against.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampling ran out of attempts. Retryable.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(std::uint64_t attempts, double hit_rate);

  std::uint64_t attempts() const noexcept { return attempts_; }
  double hit_rate() const noexcept { return hit_rate_; }

 private:
  std::uint64_t attempts_;
  double hit_rate_;
};

}  // namespace cvxlines
