#include "cvxlines/errors.hpp"

namespace cvxlines {

BudgetExhausted::BudgetExhausted(std::uint64_t attempts, double hit_rate)
    : std::runtime_error("rejection budget exhausted after " +
                         std::to_string(attempts) +
                         " attempts (empirical hit rate " +
                         std::to_string(hit_rate) + ")"),
      attempts_(attempts),
      hit_rate_(hit_rate) {}

}  // namespace cvxlines
