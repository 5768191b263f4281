#include "cvxlines/special.hpp"

#include <array>
#include <cmath>

#include "cvxlines/errors.hpp"

namespace cvxlines {

namespace {

using EulerianTable = std::array<std::array<double, kMaxPolylogOrder + 1>, kMaxPolylogOrder + 1>;

EulerianTable make_eulerian() {
  EulerianTable t{};
  t[0][0] = 1.0;
  for (int p = 1; p <= kMaxPolylogOrder; ++p) {
    for (int m = 0; m < p; ++m) {
      const double left = m > 0 ? t[p - 1][m - 1] : 0.0;
      t[p][m] = (m + 1) * t[p - 1][m] + (p - m) * left;
    }
  }
  return t;
}

const EulerianTable& eulerian() {
  static const EulerianTable table = make_eulerian();
  return table;
}

}  // namespace

double polylog_neg(int p, double y, double one_minus_y) {
  if (p < 0 || p > kMaxPolylogOrder) throw DomainError("polylog order out of range");
  if (!(std::fabs(y) < 1.0)) throw DomainError("polylog argument must satisfy |y| < 1");
  if (p == 0) return y / one_minus_y;
  const auto& row = eulerian()[p];
  double poly = 0.0;
  for (int m = p - 1; m >= 0; --m) poly = poly * y + row[m];
  return y * poly / std::pow(one_minus_y, p + 1);
}

double exp_power_sum(int p, double u) {
  if (!(u > 0.0)) throw DomainError("exp_power_sum needs u > 0");
  const double y = std::exp(-u);
  const double omy = -std::expm1(-u);
  return polylog_neg(p, y, omy) + (p == 0 ? 1.0 : 0.0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace cvxlines
