#pragma once

#include <cstddef>

namespace cvxlines {

inline constexpr int kMaxPolylogOrder = 16;

// Li_{-p}(y) = sum_{k>=1} k^p y^k for |y| < 1 and 0 <= p <= 16, via Eulerian
// polynomials. `one_minus_y` is 1 - y supplied separately so callers with
// y = exp(-u) can pass -expm1(-u) without cancellation.
double polylog_neg(int p, double y, double one_minus_y);
inline double polylog_neg(int p, double y) { return polylog_neg(p, y, 1.0 - y); }

// S_p(u) = sum_{k>=0} k^p e^{-ku}, with 0^0 = 1, for u > 0.
double exp_power_sum(int p, double u);

// Binomial coefficient as a double (exact for the small arguments used here).
double binomial(int n, int k);

}  // namespace cvxlines
