#include "cvxlines/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cvxlines/ensemble.hpp"
#include "cvxlines/errors.hpp"
#include "cvxlines/parallel.hpp"
#include "cvxlines/special.hpp"

namespace cvxlines {

namespace {

const std::vector<signed char>& mobius_sieve() {
  static const std::vector<signed char> table = [] {
    const std::int64_t N = kMobiusSieveBound;
    std::vector<signed char> mu(N + 1, 1);
    std::vector<bool> composite(N + 1, false);
    mu[0] = 0;
    for (std::int64_t p = 2; p <= N; ++p) {
      if (composite[p]) continue;
      for (std::int64_t m = p; m <= N; m += p) {
        if (m > p) composite[m] = true;
        mu[m] = static_cast<signed char>(-mu[m]);
      }
      if (p <= N / p) {
        for (std::int64_t m = p * p; m <= N; m += p * p) mu[m] = 0;
      }
    }
    return mu;
  }();
  return table;
}

void check_alpha(const std::array<double, 2>& alpha) {
  if (!(alpha[0] > 0.0 && alpha[1] > 0.0) || !std::isfinite(alpha[0]) ||
      !std::isfinite(alpha[1])) {
    throw DomainError("alpha must be positive and finite");
  }
}

double estimated_count(const std::array<double, 2>& alpha, double T) {
  // coprime density 6/pi^2 over the triangle alpha.x <= T, plus the axes
  return 0.61 * T * T / (2.0 * alpha[0] * alpha[1]) + T / alpha[0] + T / alpha[1] + 2.0;
}

double excluded_tail(const std::array<double, 2>& alpha, const Ensemble& ensemble, double T) {
  // (beta(w)-1)/w is nondecreasing for nonnegative b, so every excluded
  // direction satisfies beta(z^x) - 1 <= z^x (beta(w0) - 1)/w0, w0 = e^-T.
  const Weight w0 = Weight::from_exponent(T);
  const double factor = std::expm1(ensemble.log_beta(w0)) / w0.w;
  return factor * lattice_exp_tail(0, 0, alpha, T);
}

}  // namespace

std::int64_t gcd64(std::int64_t a, std::int64_t b) noexcept {
  return std::gcd(a, b);
}

int mobius(std::int64_t m) {
  if (m < 1) throw DomainError("mobius argument must be >= 1");
  if (m <= kMobiusSieveBound) return mobius_sieve()[static_cast<std::size_t>(m)];
  int sign = 1;
  for (std::int64_t p = 2; p <= m / p; ++p) {
    if (m % p != 0) continue;
    m /= p;
    if (m % p == 0) return 0;
    sign = -sign;
  }
  if (m > 1) sign = -sign;
  return sign;
}

double lattice_exp_tail(int p1, int p2, std::array<double, 2> alpha, double T) {
  check_alpha(alpha);
  if (T <= 0.0) T = 0.0;
  auto log_bound = [&](double lambda) {
    const double u1 = (1.0 - lambda) * alpha[0];
    const double u2 = (1.0 - lambda) * alpha[1];
    return -lambda * T + std::log(exp_power_sum(p1, u1)) + std::log(exp_power_sum(p2, u2));
  };
  // The log-bound is convex in lambda: ternary search.
  double lo = 0.0, hi = 1.0 - 1e-9;
  for (int it = 0; it < 100; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (log_bound(m1) < log_bound(m2)) hi = m2; else lo = m1;
  }
  return std::exp(log_bound(0.5 * (lo + hi)));
}

DirectionSet directions_within(std::array<double, 2> alpha, double T, std::size_t max_dirs) {
  check_alpha(alpha);
  T = std::max({T, alpha[0], alpha[1]});
  const double est = estimated_count(alpha, T);
  if (est > static_cast<double>(max_dirs)) {
    std::ostringstream msg;
    msg << "direction set with cutoff T=" << T << " and alpha=(" << alpha[0] << ","
        << alpha[1] << ") would hold about " << static_cast<std::int64_t>(est)
        << " directions, above the budget of " << max_dirs;
    throw ResourceError(msg.str());
  }
  const auto x1_max = static_cast<std::int64_t>(std::floor(T / alpha[0]));
  const std::size_t stripes = static_cast<std::size_t>(x1_max + 1);
  const std::size_t chunks = std::min<std::size_t>(stripes, 256);
  std::vector<std::vector<Direction>> parts(chunks);
  parallel_chunks(chunks, chunks, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t c = c0; c < c1; ++c) {
      const std::size_t lo = c * stripes / chunks, hi = (c + 1) * stripes / chunks;
      for (std::size_t s = lo; s < hi; ++s) {
        const auto x1 = static_cast<std::int64_t>(s);
        const double rest = T - alpha[0] * static_cast<double>(x1);
        if (rest < 0.0) continue;
        const auto x2_max = static_cast<std::int64_t>(std::floor(rest / alpha[1]));
        for (std::int64_t x2 = 0; x2 <= x2_max; ++x2) {
          if (std::gcd(x1, x2) == 1) parts[c].push_back({x1, x2});
        }
      }
    }
  });
  DirectionSet set;
  set.alpha = alpha;
  set.cutoff = T;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  set.dirs.reserve(total);
  for (auto& p : parts) set.dirs.insert(set.dirs.end(), p.begin(), p.end());
  std::sort(set.dirs.begin(), set.dirs.end(), slope_less);
  return set;
}

std::vector<Direction> directions_in_box(std::int64_t n1, std::int64_t n2) {
  if (n1 < 0 || n2 < 0) throw DomainError("box must be nonnegative");
  std::vector<Direction> dirs;
  for (std::int64_t x1 = 0; x1 <= n1; ++x1) {
    for (std::int64_t x2 = 0; x2 <= n2; ++x2) {
      if (std::gcd(x1, x2) == 1) dirs.push_back({x1, x2});
    }
  }
  std::sort(dirs.begin(), dirs.end(), slope_less);
  return dirs;
}

double direction_cutoff(std::array<double, 2> alpha, const Ensemble& ensemble,
                        double eps_tail, double* tail_bound) {
  check_alpha(alpha);
  if (!(eps_tail > 0.0)) throw DomainError("eps_tail must be positive");
  const double floor_T = std::max(alpha[0], alpha[1]);
  for (int j = 1; j <= 20000; ++j) {
    const double T = 0.25 * j;
    if (T < floor_T) continue;
    const double bound = excluded_tail(alpha, ensemble, T);
    if (bound <= eps_tail) {
      if (tail_bound) *tail_bound = bound;
      return T;
    }
  }
  throw PrecisionError("no direction cutoff certifies the requested tail");
}

DirectionSet enumerate_directions(std::array<double, 2> alpha, const Ensemble& ensemble,
                                  double eps_tail, std::size_t max_dirs) {
  double bound = 0.0;
  const double T = direction_cutoff(alpha, ensemble, eps_tail, &bound);
  DirectionSet set = directions_within(alpha, T, max_dirs);
  set.tail_mass_bound = bound;
  return set;
}

double mobius_dirichlet(double sigma, double tol) {
  if (!(sigma > 1.0)) throw DomainError("mobius_dirichlet needs sigma > 1");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  // sum_{m>M} m^-sigma <= M^(1-sigma)/(sigma-1)
  const double M_real = std::ceil(std::pow(tol * (sigma - 1.0), -1.0 / (sigma - 1.0)));
  if (!(M_real <= 1e8)) {
    throw PrecisionError("mobius_dirichlet would need more than 1e8 terms");
  }
  const auto M = std::max<std::int64_t>(1, static_cast<std::int64_t>(M_real));
  CompensatedSum acc;
  for (std::int64_t m = M; m >= 1; --m) {
    const int mu = mobius(m);
    if (mu != 0) acc.add(mu * std::pow(static_cast<double>(m), -sigma));
  }
  return acc.value();
}

void write_csv(std::ostream& out, const DirectionSet& set) {
  out << "x1,x2\n";
  for (const auto& d : set.dirs) out << d.x1 << ',' << d.x2 << '\n';
}

}  // namespace cvxlines
