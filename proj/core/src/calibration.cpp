#include "cvxlines/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cvxlines/errors.hpp"
#include "cvxlines/parallel.hpp"
#include "cvxlines/special.hpp"

namespace cvxlines {

namespace {

void check_order(int q) {
  if (q < 1 || q > kMaxCumulantOrder) {
    throw DomainError("cumulant order must lie in [1, " + std::to_string(kMaxCumulantOrder) + "]");
  }
}

double factorial(int q) {
  double f = 1.0;
  for (int i = 2; i <= q; ++i) f *= i;
  return f;
}

// C_q(w0) = sum_k k^q |a_k| w0^(k-1): |kappa_q(w)| <= w C_q(w0) for w <= w0.
double abs_cumulant_slope(const Ensemble& e, int q, double T) {
  const Weight w0 = Weight::from_exponent(T);
  return e.abs_cumulant(q, w0) / w0.w;
}

struct TailTerm {
  int q;   // cumulant order of nu (0 = raw weight)
  int p1;  // power of x1
  int p2;  // power of x2
  double coef = 1.0;
};

double excluded_bound(const Ensemble& e, const std::array<double, 2>& alpha, double T,
                      const TailTerm& t) {
  return t.coef * abs_cumulant_slope(e, t.q, T) * lattice_exp_tail(t.p1, t.p2, alpha, T);
}

// Smallest cutoff on the 0.25 grid for which every requested lattice tail
// is below tol.
double cutoff_for(const Ensemble& e, const std::array<double, 2>& alpha,
                  const std::vector<TailTerm>& terms, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double floor_T = std::max(alpha[0], alpha[1]);
  for (int j = 1; j <= 40000; ++j) {
    const double T = 0.25 * j;
    if (T < floor_T) continue;
    bool ok = true;
    for (const auto& t : terms) {
      if (!(excluded_bound(e, alpha, T, t) <= tol)) {
        ok = false;
        break;
      }
    }
    if (ok) return T;
  }
  throw PrecisionError("lattice sum tail cannot be certified");
}

double tail_total(const Ensemble& e, const std::array<double, 2>& alpha, double T,
                  const TailTerm& t) {
  return excluded_bound(e, alpha, T, t);
}

Weight weight_of(const Direction& d, const std::array<double, 2>& alpha) {
  return Weight::from_exponent(alpha[0] * static_cast<double>(d.x1) +
                               alpha[1] * static_cast<double>(d.x2));
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// sup_k |a_k| over the whole series.
double coefficient_sup(const Ensemble& e) {
  double sup = 0.0;
  for (double c : e.a_series().coeffs) sup = std::max(sup, std::fabs(c));
  const auto& env = e.a_series().envelope;
  if (!env) throw PrecisionError("coefficient bound needs a tail envelope");
  if (!env->finite_series()) {
    if (env->ratio > 1.0 || env->power < 0.0) {
      throw PrecisionError("coefficients are not bounded by the tail envelope");
    }
    const double K1 = static_cast<double>(e.terms() + 1);
    sup = std::max(sup, env->scale * std::pow(env->ratio, K1) * std::pow(K1, -env->power));
  }
  return sup;
}

// log of sum_{h>=N} h^p y^h, via the ratio bound ((N+1)/N)^p y.
double log_power_geometric_tail(int p, double log_y, double N) {
  const double ratio = std::exp(p * std::log1p(1.0 / N) + log_y);
  if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
  return p * std::log(N) + N * log_y - std::log1p(-ratio);
}

}  // namespace

double kappa(const EnsembleSpec& spec, double tol) {
  double tol_A = tol;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const SeriesValue A = dirichlet_sum(spec, 2.0, tol_A);
    if (!(A.value > 0.0)) throw DomainError("A(2) must be positive");
    const double k = std::cbrt(A.value / kZeta2);
    // d kappa / d A = 1 / (3 zeta(2) kappa^2)
    const double err = A.tail_bound / (3.0 * kZeta2 * k * k);
    if (err <= tol) return k;
    tol_A *= 0.5 * tol / err;
  }
  throw PrecisionError("kappa could not be certified");
}

GrandCanonicalParams calibrate_with_kappa(double k, Endpoint n) {
  if (n[0] < 1 || n[1] < 1) throw DomainError("n must be positive");
  if (!(k > 0.0)) throw DomainError("kappa must be positive");
  GrandCanonicalParams p;
  p.n = n;
  p.kappa = k;
  const double n1 = static_cast<double>(n[0]), n2 = static_cast<double>(n[1]);
  p.delta = {k * std::cbrt(n2 / n1), k * std::cbrt(n1 / n2)};
  // alpha_1 n_1 = alpha_2 n_2 = kappa (n1 n2)^(1/3)
  const double c = k * std::cbrt(n1 * n2);
  p.alpha = {c / n1, c / n2};
  p.z = {std::exp(-p.alpha[0]), std::exp(-p.alpha[1])};
  return p;
}

GrandCanonicalParams calibrate(const EnsembleSpec& spec, Endpoint n, double tol) {
  return calibrate_with_kappa(kappa(spec, tol), n);
}

Estimate cumulant_xi_mobius(const Ensemble& e, const GrandCanonicalParams& params, int q, int j,
                            double tol) {
  check_order(q);
  if (j != 1 && j != 2) throw DomainError("coordinate index must be 1 or 2");
  const double a_main = params.alpha[j - 1];
  const double a_other = params.alpha[2 - j];
  const double sup_a = coefficient_sup(e);
  // Terms h >= N are bounded by
  //   sup|a| q! h^(q+1) e^{-h a_main} / ((1-e^{-N a_main})^(q+1) (1-e^{-N a_other})).
  auto tail_at = [&](double N) {
    const double denom = (q + 1) * std::log(-std::expm1(-N * a_main)) +
                         std::log(-std::expm1(-N * a_other));
    const double lt = log_power_geometric_tail(q + 1, -a_main, N);
    return sup_a * factorial(q) * std::exp(lt - denom);
  };
  std::size_t N = 64;
  while (!(tail_at(static_cast<double>(N)) <= tol)) {
    if (N > 20000000) throw PrecisionError("Moebius series truncation budget exceeded");
    N *= 2;
  }
  {
    std::size_t lo = N / 2, hi = N;
    while (N > 64 && hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (tail_at(static_cast<double>(mid)) <= tol) hi = mid; else lo = mid;
    }
    N = hi;
  }
  const std::size_t H = N - 1;  // sum h = 1..H
  std::vector<double> a;
  if (H <= e.terms()) {
    a.assign(e.a_series().coeffs.begin(), e.a_series().coeffs.begin() + static_cast<std::ptrdiff_t>(H));
  } else {
    a = a_coeffs(e.spec(), H).coeffs;
  }
  std::vector<double> c(H + 1, 0.0);
  for (std::size_t k = 1; k <= H; ++k) {
    if (a[k - 1] == 0.0) continue;
    for (std::size_t m = 1; k * m <= H; ++m) {
      const int mu = mobius(static_cast<std::int64_t>(m));
      if (mu != 0) c[k * m] += mu * a[k - 1];
    }
  }
  CompensatedSum acc;
  for (std::size_t h = H; h >= 1; --h) {
    if (c[h] == 0.0) continue;
    const double hh = static_cast<double>(h);
    acc.add(ipow(hh, q) * c[h] * exp_power_sum(q, hh * a_main) * exp_power_sum(0, hh * a_other));
  }
  return {acc.value(), tail_at(static_cast<double>(N))};
}

Estimate2 expected_endpoint(const Ensemble& e, const GrandCanonicalParams& params, double tol) {
  const Estimate e1 = cumulant_xi_mobius(e, params, 1, 1, tol);
  const Estimate e2 = cumulant_xi_mobius(e, params, 1, 2, tol);
  return {{e1.value, e2.value}, {e1.tail_bound, e2.tail_bound}};
}

Estimate2 expected_endpoint_lattice(const Ensemble& e, const GrandCanonicalParams& params,
                                    double tol) {
  const std::vector<TailTerm> terms{{1, 1, 0}, {1, 0, 1}};
  const double T = cutoff_for(e, params.alpha, terms, tol);
  const DirectionSet set = directions_within(params.alpha, T);
  const auto& alpha = params.alpha;
  const auto sums = deterministic_sum<2>(set.size(), [&](std::size_t i) {
    const Direction& d = set.dirs[i];
    const double k1 = e.cumulant(1, weight_of(d, alpha));
    return std::array<double, 2>{static_cast<double>(d.x1) * k1, static_cast<double>(d.x2) * k1};
  });
  return {{sums[0], sums[1]},
          {tail_total(e, alpha, T, terms[0]), tail_total(e, alpha, T, terms[1])}};
}

std::vector<Point> expected_profile(const Ensemble& e, const GrandCanonicalParams& params,
                                    const std::vector<double>& t_grid, double tol) {
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw DomainError("profile parameter t must lie in [0, inf]");
  }
  const std::vector<TailTerm> terms{{1, 1, 0}, {1, 0, 1}};
  const double T = cutoff_for(e, params.alpha, terms, tol);
  const DirectionSet set = directions_within(params.alpha, T);
  const auto& alpha = params.alpha;
  std::vector<double> k1(set.size());
  parallel_chunks(set.size(), std::max<std::size_t>(1, set.size() / kReduceBlock + 1),
                  [&](std::size_t b, std::size_t f) {
                    for (std::size_t i = b; i < f; ++i) k1[i] = e.cumulant(1, weight_of(set.dirs[i], alpha));
                  });
  // Directions are sorted by slope, so xi(t) is a prefix sum.
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < t_grid.size(); ++i) order.emplace_back(t_grid[i], i);
  std::sort(order.begin(), order.end());
  std::vector<Point> out(t_grid.size());
  const double n1 = static_cast<double>(params.n[0]), n2 = static_cast<double>(params.n[1]);
  CompensatedSum s1, s2;
  std::size_t idx = 0;
  for (const auto& [t, slot] : order) {
    while (idx < set.size()) {
      const Direction& d = set.dirs[idx];
      const bool inside = std::isinf(t) || static_cast<double>(d.x2) * n1 <= t * static_cast<double>(d.x1) * n2;
      if (!inside) break;
      s1.add(static_cast<double>(d.x1) * k1[idx]);
      s2.add(static_cast<double>(d.x2) * k1[idx]);
      ++idx;
    }
    out[slot] = {s1.value(), s2.value()};
  }
  return out;
}

Point expected_profile(const Ensemble& e, const GrandCanonicalParams& params, double t, double tol) {
  return expected_profile(e, params, std::vector<double>{t}, tol)[0];
}

Estimate cumulant_xi(const Ensemble& e, const GrandCanonicalParams& params, int q, int j,
                     double tol) {
  check_order(q);
  if (j != 1 && j != 2) throw DomainError("coordinate index must be 1 or 2");
  const TailTerm term{q, j == 1 ? q : 0, j == 2 ? q : 0};
  const double T = cutoff_for(e, params.alpha, {term}, tol);
  const DirectionSet set = directions_within(params.alpha, T);
  const auto sums = deterministic_sum<1>(set.size(), [&](std::size_t i) {
    const Direction& d = set.dirs[i];
    const double x = static_cast<double>(j == 1 ? d.x1 : d.x2);
    if (x == 0.0) return std::array<double, 1>{0.0};
    return std::array<double, 1>{ipow(x, q) * e.cumulant(q, weight_of(d, params.alpha))};
  });
  return {sums[0], tail_total(e, params.alpha, T, term)};
}

Mat2 covariance(const Ensemble& e, const GrandCanonicalParams& params, double tol) {
  const std::vector<TailTerm> terms{{2, 2, 0}, {2, 1, 1}, {2, 0, 2}};
  const double T = cutoff_for(e, params.alpha, terms, tol);
  const DirectionSet set = directions_within(params.alpha, T);
  const auto s = deterministic_sum<3>(set.size(), [&](std::size_t i) {
    const Direction& d = set.dirs[i];
    const double k2 = e.cumulant(2, weight_of(d, params.alpha));
    const double x1 = static_cast<double>(d.x1), x2 = static_cast<double>(d.x2);
    return std::array<double, 3>{x1 * x1 * k2, x1 * x2 * k2, x2 * x2 * k2};
  });
  return Mat2{{{s[0], s[1]}, {s[1], s[2]}}};
}

namespace {

// Tail terms for sum |x|^3 mu_3(x) using mu_3 <= 8 m_3 and
// m_3 <= w (C3 + 3 w0 C2 C1 + w0^2 C1^3).
double lyapunov_tail(const Ensemble& e, const std::array<double, 2>& alpha, double T) {
  const double w0 = std::exp(-T);
  const double C1 = abs_cumulant_slope(e, 1, T);
  const double C2 = abs_cumulant_slope(e, 2, T);
  const double C3 = abs_cumulant_slope(e, 3, T);
  const double M3 = C3 + 3.0 * w0 * C2 * C1 + w0 * w0 * C1 * C1 * C1;
  // |x|^3 <= (x1 + x2)^3
  double lat = 0.0;
  for (int p = 0; p <= 3; ++p) lat += binomial(3, p) * lattice_exp_tail(p, 3 - p, alpha, T);
  return 8.0 * M3 * lat;
}

double lyapunov_from(const Ensemble& e, const GrandCanonicalParams& params, const Mat2& K,
                     double tol) {
  const auto& alpha = params.alpha;
  double T = std::max(alpha[0], alpha[1]);
  for (int j = 1;; ++j) {
    T = std::max(T, 0.25 * j);
    if (lyapunov_tail(e, alpha, T) <= tol) break;
    if (j > 40000) throw PrecisionError("Lyapunov sum tail cannot be certified");
  }
  const DirectionSet set = directions_within(alpha, T);
  const auto s = deterministic_sum<1>(set.size(), [&](std::size_t i) {
    const Direction& d = set.dirs[i];
    const double x1 = static_cast<double>(d.x1), x2 = static_cast<double>(d.x2);
    const double norm = std::hypot(x1, x2);
    const Weight w = weight_of(d, alpha);
    return std::array<double, 1>{norm * norm * norm * e.abs_central_moment3(w.w)};
  });
  const double v = spectral_norm(inverse_sqrt(K));
  return v * v * v * s[0];
}

}  // namespace

double lyapunov(const Ensemble& e, const GrandCanonicalParams& params, double tol) {
  return lyapunov_from(e, params, covariance(e, params, tol), tol);
}

MomentReport moment_report(const Ensemble& e, const GrandCanonicalParams& params, int max_order,
                           double tol) {
  check_order(std::max(max_order, 2));
  std::vector<TailTerm> terms{{2, 2, 0}, {2, 1, 1}, {2, 0, 2}};
  for (int q = 1; q <= max_order; ++q) {
    terms.push_back({q, q, 0});
    terms.push_back({q, 0, q});
  }
  const double T = cutoff_for(e, params.alpha, terms, tol);
  const DirectionSet set = directions_within(params.alpha, T);
  const int Q = std::max(max_order, 2);
  // slots: 2Q cumulants, then K12
  constexpr std::size_t kSlots = 2 * kMaxCumulantOrder + 1;
  const auto s = deterministic_sum<kSlots>(set.size(), [&](std::size_t i) {
    std::array<double, kSlots> out{};
    const Direction& d = set.dirs[i];
    const Weight w = weight_of(d, params.alpha);
    const double x1 = static_cast<double>(d.x1), x2 = static_cast<double>(d.x2);
    for (int q = 1; q <= Q; ++q) {
      const double kq = e.cumulant(q, w);
      out[2 * (q - 1)] = ipow(x1, q) * kq;
      out[2 * (q - 1) + 1] = ipow(x2, q) * kq;
      if (q == 2) out[2 * kMaxCumulantOrder] = x1 * x2 * kq;
    }
    return out;
  });
  MomentReport r;
  for (int q = 1; q <= max_order; ++q) r.cumulants.push_back({s[2 * (q - 1)], s[2 * (q - 1) + 1]});
  r.a_z = {s[0], s[1]};
  r.K = Mat2{{{s[2], s[2 * kMaxCumulantOrder]}, {s[2 * kMaxCumulantOrder], s[3]}}};
  r.det_K = r.K[0][0] * r.K[1][1] - r.K[0][1] * r.K[1][0];
  r.V = inverse_sqrt(r.K);
  r.L_z = lyapunov_from(e, params, r.K, tol);
  return r;
}

double lclt_density(const MomentReport& report, Point m) {
  const Mat2& K = report.K;
  const double det = K[0][0] * K[1][1] - K[0][1] * K[1][0];
  if (!(det > 0.0)) throw DomainError("covariance is not positive definite");
  const double d1 = m[0] - report.a_z[0], d2 = m[1] - report.a_z[1];
  // quadratic form with K^{-1}
  const double qf = (K[1][1] * d1 * d1 - 2.0 * K[0][1] * d1 * d2 + K[0][0] * d2 * d2) / det;
  return std::exp(-0.5 * qf) / (2.0 * std::numbers::pi * std::sqrt(det));
}

std::array<double, 2> sym_eigenvalues(const Mat2& A) {
  const double mean = 0.5 * (A[0][0] + A[1][1]);
  const double half = 0.5 * (A[0][0] - A[1][1]);
  const double rad = std::hypot(half, A[0][1]);
  return {mean - rad, mean + rad};
}

Mat2 inverse_sqrt(const Mat2& A) {
  if (A[0][1] != A[1][0]) throw DomainError("matrix is not symmetric");
  const auto ev = sym_eigenvalues(A);
  if (!(ev[0] > 0.0)) throw DomainError("matrix is not positive definite");
  // Eigenvector of the larger eigenvalue, chosen to avoid cancellation.
  double c = 1.0, s = 0.0;
  if (A[0][1] != 0.0) {
    double vx, vy;
    if (A[0][0] >= A[1][1]) {
      vx = ev[1] - A[1][1];
      vy = A[0][1];
    } else {
      vx = A[0][1];
      vy = ev[1] - A[0][0];
    }
    const double nrm = std::hypot(vx, vy);
    c = vx / nrm;
    s = vy / nrm;
  } else if (A[1][1] > A[0][0]) {
    c = 0.0;
    s = 1.0;
  }
  const double f_big = 1.0 / std::sqrt(ev[1]), f_small = 1.0 / std::sqrt(ev[0]);
  // V = f_big u u^T + f_small v v^T with u = (c,s), v = (-s,c)
  Mat2 V;
  V[0][0] = f_big * c * c + f_small * s * s;
  V[1][1] = f_big * s * s + f_small * c * c;
  V[0][1] = V[1][0] = (f_big - f_small) * c * s;
  return V;
}

double spectral_norm(const Mat2& A) {
  if (A[0][1] == A[1][0]) {
    const auto ev = sym_eigenvalues(A);
    return std::max(std::fabs(ev[0]), std::fabs(ev[1]));
  }
  // sqrt of the largest eigenvalue of A^T A
  Mat2 AtA;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) AtA[i][j] = A[0][i] * A[0][j] + A[1][i] * A[1][j];
  AtA[1][0] = AtA[0][1];
  return std::sqrt(sym_eigenvalues(AtA)[1]);
}

Mat2 multiply(const Mat2& A, const Mat2& B) {
  Mat2 C{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) C[i][j] = A[i][0] * B[0][j] + A[i][1] * B[1][j];
  return C;
}

}  // namespace cvxlines
