#pragma once

// Calibration z(n) and the analytic moments of the endpoint xi under Q_z.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "cvxlines/ensemble.hpp"
#include "cvxlines/lattice.hpp"
#include "cvxlines/series.hpp"

namespace cvxlines {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Point = std::array<double, 2>;
using Endpoint = std::array<std::int64_t, 2>;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kZeta2 = 1.6449340668482264;  // pi^2/6
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr int kMaxCumulantOrder = 8;

struct GrandCanonicalParams {
  Endpoint n{1, 1};
  double kappa = 0.0;
  std::array<double, 2> delta{};
  std::array<double, 2> alpha{};
  std::array<double, 2> z{};
};

struct Estimate {
  double value = 0.0;
  double tail_bound = 0.0;
};

struct Estimate2 {
  Point value{};
  Point tail_bound{};
};

struct MomentReport {
  Point a_z{};
  Mat2 K{};
  double det_K = 0.0;
  Mat2 V{};
  // cumulants[q-1][j] = kappa_q[xi_{j+1}]
  std::vector<Point> cumulants;
  double L_z = 0.0;
};

// kappa = (A(2)/zeta(2))^(1/3), certified to tol.
double kappa(const EnsembleSpec& spec, double tol = kDefaultTol);

GrandCanonicalParams calibrate(const EnsembleSpec& spec, Endpoint n, double tol = kDefaultTol);
// alpha_j = delta_j n_j^(-1/3) with delta_1 = kappa (n2/n1)^(1/3), delta_2 = kappa (n1/n2)^(1/3).
GrandCanonicalParams calibrate_with_kappa(double kappa, Endpoint n);

// E_z(xi) by the Moebius-inverted double series
//   E xi_1 = sum_h h c(h) e^{-h a1} / ((1 - e^{-h a1})^2 (1 - e^{-h a2})),
//   c = (a_k) * mu (Dirichlet convolution).
Estimate2 expected_endpoint(const Ensemble& ensemble, const GrandCanonicalParams& params,
                            double tol = kDefaultTol);
// E_z(xi) as the direct sum over coprime directions.
Estimate2 expected_endpoint_lattice(const Ensemble& ensemble, const GrandCanonicalParams& params,
                                    double tol = kDefaultTol);

// E_z[xi(t)] over directions with x2/x1 <= t n2/n1; t may be kInfinity.
Point expected_profile(const Ensemble& ensemble, const GrandCanonicalParams& params, double t,
                       double tol = kDefaultTol);
std::vector<Point> expected_profile(const Ensemble& ensemble, const GrandCanonicalParams& params,
                                    const std::vector<double>& t_grid, double tol = kDefaultTol);

// K_z(i,j) = sum_x x_i x_j Var nu(x).
Mat2 covariance(const Ensemble& ensemble, const GrandCanonicalParams& params,
                double tol = kDefaultTol);

// kappa_q[xi_j] = sum_x x_j^q kappa_q(z^x), j in {1,2}, 1 <= q <= 8.
Estimate cumulant_xi(const Ensemble& ensemble, const GrandCanonicalParams& params, int q, int j,
                     double tol = kDefaultTol);
// Same quantity by Moebius inversion; much cheaper for large n.
Estimate cumulant_xi_mobius(const Ensemble& ensemble, const GrandCanonicalParams& params, int q,
                            int j, double tol = kDefaultTol);

// L_z = ||V_z||^3 sum_x |x|^3 E|nu(x) - E nu(x)|^3.
double lyapunov(const Ensemble& ensemble, const GrandCanonicalParams& params,
                double tol = kDefaultTol);

MomentReport moment_report(const Ensemble& ensemble, const GrandCanonicalParams& params,
                           int max_order = 4, double tol = kDefaultTol);

// m_q = kappa_q + sum_{i=1}^{q-1} C(q-1, i-1) kappa_i m_{q-i}.
template <class T>
std::vector<T> moments_from_cumulants(const std::vector<T>& cumulants) {
  std::vector<T> m;
  m.reserve(cumulants.size());
  for (std::size_t q = 1; q <= cumulants.size(); ++q) {
    T v = cumulants[q - 1];
    T binom = T(1);  // C(q-1, i-1)
    for (std::size_t i = 1; i < q; ++i) {
      v += binom * cumulants[i - 1] * m[q - i - 1];
      binom = binom * T(static_cast<long>(q - i)) / T(static_cast<long>(i));
    }
    m.push_back(v);
  }
  return m;
}

// Bivariate normal density with mean a_z and covariance K_z at m.
double lclt_density(const MomentReport& report, Point m);

// Symmetric 2x2 helpers.
std::array<double, 2> sym_eigenvalues(const Mat2& A);  // ascending
Mat2 inverse_sqrt(const Mat2& A);                      // throws DomainError unless SPD
double spectral_norm(const Mat2& A);
Mat2 multiply(const Mat2& A, const Mat2& B);

}  // namespace cvxlines
