#include "cvxlines/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "cvxlines/errors.hpp"
#include "cvxlines/parallel.hpp"

namespace cvxlines {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest truncation tried when a Dirichlet sum must be certified.
constexpr std::size_t kMaxClosedTerms = std::size_t{1} << 22;
constexpr std::size_t kMaxLogRatioTerms = std::size_t{1} << 16;

bool is_positive_integer(double r) {
  return r >= 1.0 && r == std::floor(r) && r < 1e9;
}

TailEnvelope builtin_envelope(const EnsembleSpec& spec) {
  switch (spec.family) {
    case Family::kMultiset:
      return {spec.r, spec.rho, 1.0, true, false};
    case Family::kSelection:
      return {spec.r, spec.rho, 1.0, true, true};
    case Family::kAssembly:
      if (spec.rho == 0.0) return {0.0, 0.0, 0.0, true, false};
      return {spec.r / spec.rho, spec.rho, 0.0, true, false};
    case Family::kLogRatio:
      return {spec.r, spec.rho, 1.0, false, false};
    case Family::kCustom:
      break;
  }
  return {};
}

// ln t_k - style log of scale * u^k * k^-e, guarded for u == 0.
double log_term(double scale, double u, double e, double k) {
  return std::log(scale) + k * std::log(u) - e * std::log(k);
}

struct TailEstimate {
  double shift = 0.0;  // added to the partial sum
  double bound = 0.0;  // certified |true tail - shift|
};

// Tail of sum_{k>K} a_k k^-sigma (abs == false) or |a_k| k^-sigma.
TailEstimate dirichlet_tail(const std::optional<TailEnvelope>& env, std::size_t K,
                            double sigma, bool abs) {
  if (!env) return {0.0, kInf};
  if (env->finite_series()) return {0.0, 0.0};
  const double e = env->power + sigma;
  const double u = env->ratio;
  const double N = static_cast<double>(K) + 1.0;
  if (env->exact && env->alternating && !abs && u <= 1.0 && e >= 0.0) {
    return {0.0, env->scale * std::exp(log_term(1.0, u, e, N))};
  }
  if (env->exact && u == 1.0 && e > 1.0 && (abs || !env->alternating)) {
    // Euler-Maclaurin through the first derivative term; the remainder of a
    // completely monotone summand is bounded by the next term.
    const double est = std::pow(N, 1.0 - e) / (e - 1.0) + 0.5 * std::pow(N, -e) +
                       e * std::pow(N, -e - 1.0) / 12.0;
    const double rem = e * (e + 1.0) * (e + 2.0) * std::pow(N, -e - 3.0) / 720.0;
    return {env->scale * est, env->scale * rem};
  }
  return {0.0, envelope_tail(*env, K, 1.0, sigma)};
}

SeriesValue dirichlet_impl(const CoeffSeries& a, double sigma, double tol, bool abs) {
  if (a.kind != SeriesKind::kA) throw DomainError("Dirichlet sum needs an A-series");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const TailEstimate tail = dirichlet_tail(a.envelope, a.coeffs.size(), sigma, abs);
  if (!(tail.bound <= tol)) {
    std::ostringstream msg;
    msg << "Dirichlet sum tail bound " << tail.bound << " exceeds tolerance " << tol
        << " at truncation " << a.coeffs.size();
    throw PrecisionError(msg.str());
  }
  // Sum smallest terms first.
  CompensatedSum acc;
  for (std::size_t k = a.coeffs.size(); k >= 1; --k) {
    const double c = abs ? std::fabs(a.coeffs[k - 1]) : a.coeffs[k - 1];
    if (c != 0.0) acc.add(c * std::pow(static_cast<double>(k), -sigma));
  }
  acc.add(tail.shift);
  return {acc.value(), tail.bound};
}

std::size_t choose_truncation(const EnsembleSpec& spec, double sigma, double tol,
                              bool abs) {
  const TailEnvelope env = builtin_envelope(spec);
  const std::size_t cap =
      spec.family == Family::kLogRatio ? kMaxLogRatioTerms : kMaxClosedTerms;
  std::size_t K = 64;
  while (dirichlet_tail(env, K, sigma, abs).bound > tol) {
    if (K >= cap) {
      std::ostringstream msg;
      msg << "cannot certify Dirichlet sum of " << describe(spec) << " at sigma="
          << sigma << " to " << tol << " within " << cap << " terms";
      throw PrecisionError(msg.str());
    }
    K *= 2;
  }
  // Trim the final doubling back to the smallest sufficient length.
  std::size_t lo = K / 2, hi = K;
  if (K == 64) return K;
  while (hi - lo > std::max<std::size_t>(1, hi / 64)) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (dirichlet_tail(env, mid, sigma, abs).bound > tol) lo = mid; else hi = mid;
  }
  return hi;
}

SeriesValue dirichlet_spec(const EnsembleSpec& spec, double sigma, double tol, bool abs) {
  spec.validate();
  if (spec.family == Family::kCustom) return dirichlet_impl(*spec.custom_a, sigma, tol, abs);
  const std::size_t K = choose_truncation(spec, sigma, tol, abs);
  return dirichlet_impl(a_coeffs(spec, K), sigma, tol, abs);
}

// ln(-ln(1-x)/x), real 0 <= x < 1.
double log_logratio_kernel(double x) {
  if (x == 0.0) return 0.0;
  if (x < 0.1) {
    const std::vector<double> t = logratio_normalized(24);
    double acc = 0.0, p = 1.0;
    for (std::size_t k = 1; k <= t.size(); ++k) {
      p *= x;
      acc += t[k - 1] * p / static_cast<double>(k);
    }
    return acc;
  }
  return std::log(-std::log1p(-x) / x);
}

std::complex<double> log_logratio_kernel(std::complex<double> x) {
  if (std::abs(x) < 0.1) {
    const std::vector<double> t = logratio_normalized(24);
    std::complex<double> acc = 0.0, p = 1.0;
    for (std::size_t k = 1; k <= t.size(); ++k) {
      p *= x;
      acc += t[k - 1] * p / static_cast<double>(k);
    }
    return acc;
  }
  return std::log(-std::log(1.0 - x) / x);
}

void check_s(double s) {
  if (!(s >= 0.0 && s < 1.0)) {
    std::ostringstream msg;
    msg << "beta argument s=" << s << " outside [0,1)";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::kMultiset: return "multiset";
    case Family::kSelection: return "selection";
    case Family::kAssembly: return "assembly";
    case Family::kLogRatio: return "logratio";
    case Family::kCustom: return "custom";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::kMultiset, Family::kSelection, Family::kAssembly,
                   Family::kLogRatio, Family::kCustom}) {
    if (to_string(f) == name) return f;
  }
  throw DomainError("unknown ensemble family '" + std::string(name) + "'");
}

double CoeffSeries::a(std::size_t k) const {
  if (k == 0) throw DomainError("A-series index starts at 1");
  if (k <= coeffs.size()) return coeffs[k - 1];
  if (envelope && envelope->finite_series()) return 0.0;
  throw PrecisionError("coefficient a_" + std::to_string(k) + " beyond truncation");
}

double CoeffSeries::b(std::size_t l) const {
  if (l < coeffs.size()) return coeffs[l];
  if (envelope && envelope->finite_series()) return 0.0;
  throw PrecisionError("coefficient b_" + std::to_string(l) + " beyond truncation");
}

void EnsembleSpec::validate() const {
  auto fail = [&](const std::string& what) {
    throw DomainError("parameter out of range: " + what + " for " +
                      std::string(to_string(family)));
  };
  if (family == Family::kCustom) {
    if (!custom_a || custom_a->coeffs.empty()) fail("custom_a missing");
    if (custom_a->kind != SeriesKind::kA) fail("custom_a must be an A-series");
    for (double c : custom_a->coeffs) {
      if (!std::isfinite(c)) fail("non-finite custom_a coefficient");
    }
    if (!(custom_a->coeffs[0] > 0.0)) fail("custom a_1 must be positive");
    return;
  }
  if (!(std::isfinite(r) && r > 0.0)) fail("r=" + std::to_string(r));
  if (family == Family::kSelection && !is_positive_integer(r)) {
    fail("r=" + std::to_string(r) + " (positive integer required)");
  }
  const bool rho_zero_ok = family == Family::kAssembly;
  if (!(rho <= 1.0 && (rho > 0.0 || (rho_zero_ok && rho == 0.0)))) {
    fail("rho=" + std::to_string(rho));
  }
}

EnsembleSpec EnsembleSpec::custom(CoeffSeries a) {
  EnsembleSpec s;
  s.family = Family::kCustom;
  a.kind = SeriesKind::kA;
  s.custom_a = std::move(a);
  return s;
}

std::vector<EnsembleSpec> builtin_defaults() {
  return {EnsembleSpec::uniform(), EnsembleSpec::selection(1, 1),
          EnsembleSpec::assembly(1, 0), EnsembleSpec::logratio(1, 1)};
}

std::string describe(const EnsembleSpec& spec) {
  std::ostringstream out;
  out << to_string(spec.family);
  if (spec.family == Family::kCustom) {
    out << "(K=" << (spec.custom_a ? spec.custom_a->coeffs.size() : 0) << ")";
  } else {
    out << "(r=" << spec.r << ",rho=" << spec.rho << ")";
  }
  return out.str();
}

CoeffSeries a_coeffs(const EnsembleSpec& spec, std::size_t K) {
  if (K == 0) throw DomainError("K must be positive");
  spec.validate();
  if (spec.family == Family::kLogRatio) return logratio_a(spec.r, spec.rho, K);
  CoeffSeries out;
  out.kind = SeriesKind::kA;
  if (spec.family == Family::kCustom) {
    const CoeffSeries& c = *spec.custom_a;
    out.envelope = c.envelope;
    for (std::size_t k = 1; k <= K; ++k) {
      if (k <= c.coeffs.size()) {
        out.coeffs.push_back(c.coeffs[k - 1]);
      } else if (c.envelope && c.envelope->finite_series()) {
        out.coeffs.push_back(0.0);
      } else {
        break;
      }
    }
    if (K < c.coeffs.size()) {
      // Stored coefficients that were cut off are part of the tail.
      CompensatedSum extra;
      for (std::size_t k = K; k < c.coeffs.size(); ++k) extra.add(std::fabs(c.coeffs[k]));
      const double env_tail = c.envelope ? envelope_tail(*c.envelope, c.coeffs.size(), 1.0, 0.0) : kInf;
      out.tail_bound = extra.value() + env_tail;
      out.envelope.reset();
    } else {
      out.tail_bound = c.envelope ? envelope_tail(*c.envelope, out.coeffs.size(), 1.0, 0.0) : kInf;
    }
    return out;
  }
  out.coeffs.resize(K);
  const double r = spec.r, rho = spec.rho;
  double p = 1.0;  // rho^(k-1)
  for (std::size_t k = 1; k <= K; ++k) {
    const double kk = static_cast<double>(k);
    switch (spec.family) {
      case Family::kMultiset:
        out.coeffs[k - 1] = r * p * rho / kk;
        break;
      case Family::kSelection:
        out.coeffs[k - 1] = (k % 2 == 1 ? 1.0 : -1.0) * r * p * rho / kk;
        break;
      case Family::kAssembly:
        out.coeffs[k - 1] = k == 1 ? r : r * p;
        break;
      default:
        break;
    }
    p *= rho;
  }
  out.envelope = builtin_envelope(spec);
  out.tail_bound = envelope_tail(*out.envelope, K, 1.0, 0.0);
  return out;
}

std::vector<ExactFraction> logratio_normalized_exact(std::size_t K) {
  using boost::multiprecision::cpp_rational;
  if (K > kLogRatioExactTerms) {
    throw ResourceError("exact log-ratio coefficients are limited to " +
                        std::to_string(kLogRatioExactTerms) + " terms");
  }
  std::vector<cpp_rational> t;
  t.reserve(K);
  for (std::size_t m = 0; m < K; ++m) {
    cpp_rational v(static_cast<long>(m + 1), static_cast<long>(m + 2));
    for (std::size_t j = 1; j <= m; ++j) {
      v -= t[j - 1] / cpp_rational(static_cast<long>(m + 2 - j));
    }
    t.push_back(v);
  }
  std::vector<ExactFraction> out;
  out.reserve(K);
  for (const auto& v : t) {
    out.push_back({boost::multiprecision::numerator(v).str(),
                   boost::multiprecision::denominator(v).str()});
  }
  return out;
}

std::vector<double> logratio_normalized(std::size_t K) {
  static std::mutex mu;
  static std::vector<double> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (cache.empty()) {
    using boost::multiprecision::cpp_rational;
    std::vector<cpp_rational> t;
    for (std::size_t m = 0; m < kLogRatioExactTerms; ++m) {
      cpp_rational v(static_cast<long>(m + 1), static_cast<long>(m + 2));
      for (std::size_t j = 1; j <= m; ++j) {
        v -= t[j - 1] / cpp_rational(static_cast<long>(m + 2 - j));
      }
      t.push_back(v);
      cache.push_back(static_cast<double>(v));
    }
  }
  while (cache.size() < K) {
    const std::size_t m = cache.size();
    CompensatedSum acc;
    acc.add(static_cast<double>(m + 1) / static_cast<double>(m + 2));
    for (std::size_t j = m; j >= 1; --j) {
      acc.add(-cache[j - 1] / static_cast<double>(m + 2 - j));
    }
    cache.push_back(acc.value());
  }
  return std::vector<double>(cache.begin(), cache.begin() + static_cast<std::ptrdiff_t>(K));
}

CoeffSeries logratio_a(double r, double rho, std::size_t K) {
  EnsembleSpec{Family::kLogRatio, r, rho, {}}.validate();
  if (K == 0) throw DomainError("K must be positive");
  const std::vector<double> t = logratio_normalized(K);
  CoeffSeries out;
  out.kind = SeriesKind::kA;
  out.coeffs.resize(K);
  double p = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    p *= rho;
    out.coeffs[k - 1] = r * p * t[k - 1] / static_cast<double>(k);
  }
  out.envelope = TailEnvelope{r, rho, 1.0, false, false};
  out.tail_bound = envelope_tail(*out.envelope, K, 1.0, 0.0);
  return out;
}

CoeffSeries b_from_a(const CoeffSeries& a, std::size_t L) {
  if (a.kind != SeriesKind::kA) throw DomainError("b_from_a needs an A-series");
  const bool finite = a.envelope && a.envelope->finite_series();
  if (!finite) L = std::min(L, a.coeffs.size());
  CoeffSeries out;
  out.kind = SeriesKind::kB;
  out.coeffs.assign(L + 1, 0.0);
  out.coeffs[0] = 1.0;
  const std::size_t K = a.coeffs.size();
  for (std::size_t l = 1; l <= L; ++l) {
    CompensatedSum acc;
    for (std::size_t k = std::min(l, K); k >= 1; --k) {
      acc.add(static_cast<double>(k) * a.coeffs[k - 1] * out.coeffs[l - k]);
    }
    out.coeffs[l] = acc.value() / static_cast<double>(l);
  }
  out.tail_bound = finite && K <= L ? 0.0 : kInf;
  if (finite && K == 0) out.envelope = TailEnvelope{};
  return out;
}

CoeffSeries a_from_b(const CoeffSeries& b, std::size_t K) {
  if (b.kind != SeriesKind::kB) throw DomainError("a_from_b needs a B-series");
  if (b.coeffs.empty() || b.coeffs[0] != 1.0) throw DomainError("a_from_b requires b_0 == 1");
  const std::size_t L = b.coeffs.size() - 1;
  K = std::min(K, L);
  CoeffSeries out;
  out.kind = SeriesKind::kA;
  out.coeffs.assign(K, 0.0);
  for (std::size_t k = 1; k <= K; ++k) {
    CompensatedSum acc;
    acc.add(static_cast<double>(k) * b.coeffs[k]);
    for (std::size_t j = k - 1; j >= 1; --j) {
      acc.add(-static_cast<double>(j) * out.coeffs[j - 1] * b.coeffs[k - j]);
    }
    out.coeffs[k - 1] = acc.value() / static_cast<double>(k);
  }
  out.tail_bound = kInf;
  return out;
}

double envelope_tail(const TailEnvelope& env, std::size_t K, double x,
                     double extra_power) {
  if (env.finite_series() || x == 0.0) return 0.0;
  const double u = env.ratio * x;
  const double e = env.power + extra_power;
  if (u > 1.0) return kInf;
  if (u == 1.0) {
    if (!(e > 1.0)) return kInf;
    if (K == 0) return env.scale * (1.0 + 1.0 / (e - 1.0));
    return env.scale * std::pow(static_cast<double>(K), 1.0 - e) / (e - 1.0);
  }
  // Geometric: once the successive-term ratio bound drops below one, the
  // rest is dominated by a geometric series.
  CompensatedSum acc;
  for (std::size_t k = K + 1; k < K + 100000000; ++k) {
    const double kk = static_cast<double>(k);
    const double term = std::exp(log_term(env.scale, u, e, kk));
    const double q = e >= 0.0 ? u : u * std::pow(1.0 + 1.0 / kk, -e);
    if (q < 1.0) {
      acc.add(term / (1.0 - q));
      return acc.value();
    }
    acc.add(term);
  }
  return kInf;
}

SeriesValue dirichlet_sum(const CoeffSeries& a, double sigma, double tol) {
  return dirichlet_impl(a, sigma, tol, false);
}

SeriesValue dirichlet_abs_sum(const CoeffSeries& a, double sigma, double tol) {
  return dirichlet_impl(a, sigma, tol, true);
}

SeriesValue dirichlet_sum(const EnsembleSpec& spec, double sigma, double tol) {
  return dirichlet_spec(spec, sigma, tol, false);
}

SeriesValue dirichlet_abs_sum(const EnsembleSpec& spec, double sigma, double tol) {
  return dirichlet_spec(spec, sigma, tol, true);
}

double log_beta(const EnsembleSpec& spec, double s) {
  check_s(s);
  spec.validate();
  if (s == 0.0) return 0.0;
  const double r = spec.r, rho = spec.rho;
  switch (spec.family) {
    case Family::kMultiset: return -r * std::log1p(-rho * s);
    case Family::kSelection: return r * std::log1p(rho * s);
    case Family::kAssembly: return r * s / (1.0 - rho * s);
    case Family::kLogRatio: return r * log_logratio_kernel(rho * s);
    case Family::kCustom: break;
  }
  const CoeffSeries& a = *spec.custom_a;
  const double tail = a.envelope ? envelope_tail(*a.envelope, a.coeffs.size(), s, 0.0) : kInf;
  if (!(tail <= 1e-13)) {
    throw PrecisionError("custom series tail at s=" + std::to_string(s) +
                         " not certified (supply an envelope)");
  }
  CompensatedSum acc;
  double p = 1.0;
  for (double c : a.coeffs) {
    p *= s;
    acc.add(c * p);
  }
  return acc.value();
}

double beta_value(const EnsembleSpec& spec, double s) {
  return std::exp(log_beta(spec, s));
}

std::complex<double> log_beta(const EnsembleSpec& spec, std::complex<double> w) {
  spec.validate();
  if (!(std::abs(w) < 1.0)) throw DomainError("complex beta argument must satisfy |w| < 1");
  if (w == 0.0) return 0.0;
  const double r = spec.r, rho = spec.rho;
  switch (spec.family) {
    case Family::kMultiset: return -r * std::log(1.0 - rho * w);
    case Family::kSelection: return r * std::log(1.0 + rho * w);
    case Family::kAssembly: return r * w / (1.0 - rho * w);
    case Family::kLogRatio: return r * log_logratio_kernel(rho * w);
    case Family::kCustom: break;
  }
  const CoeffSeries& a = *spec.custom_a;
  const double tail =
      a.envelope ? envelope_tail(*a.envelope, a.coeffs.size(), std::abs(w), 0.0) : kInf;
  if (!(tail <= 1e-13)) throw PrecisionError("custom series tail not certified");
  std::complex<double> acc = 0.0, p = 1.0;
  for (double c : a.coeffs) {
    p *= w;
    acc += c * p;
  }
  return acc;
}

double b_series_tail_bound(const EnsembleSpec& spec, double s, std::size_t L) {
  check_s(s);
  if (s == 0.0) return 0.0;
  if (spec.family == Family::kSelection && static_cast<double>(L) >= spec.r) return 0.0;
  double best = kInf;
  for (int i = 1; i < 20; ++i) {
    const double R = s + (1.0 - s) * 0.05 * i;
    const double v = s / R;
    const double bound = std::exp(log_beta(spec, R) + static_cast<double>(L + 1) * std::log(v)) /
                         (1.0 - v);
    best = std::min(best, bound);
  }
  return best;
}

Assumption71Result check_assumption_71(const EnsembleSpec& spec, double C1,
                                       const std::vector<double>& theta_grid,
                                       const std::vector<double>& t_grid) {
  if (theta_grid.empty() || t_grid.empty()) throw DomainError("empty grid");
  if (!(C1 > 0.0)) throw DomainError("C1 must be positive");
  const double b1 = a_coeffs(spec, 1).coeffs[0];
  if (!(b1 > 0.0)) throw DomainError("b_1 must be positive");
  Assumption71Result res;
  res.min_margin = kInf;
  for (double theta : theta_grid) {
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta outside (0,1)");
    const double base = log_beta(spec, theta);
    for (double t : t_grid) {
      const double lhs = log_beta(spec, std::polar(theta, t)).real() - base;
      const double rhs = -C1 * b1 * theta * (1.0 - std::cos(t));
      const double margin = rhs - lhs;
      if (margin < res.min_margin) {
        res.min_margin = margin;
        res.worst_theta = theta;
        res.worst_t = t;
      }
    }
  }
  res.holds = res.min_margin >= -kAssumption71Slack;
  return res;
}

std::vector<double> default_theta_grid() {
  std::vector<double> g;
  for (int j = 1; j < 20; ++j) g.push_back(0.05 * j);
  return g;
}

std::vector<double> default_t_grid() {
  std::vector<double> g;
  for (int j = 1; 0.05 * j < std::numbers::pi; ++j) g.push_back(0.05 * j);
  g.push_back(std::numbers::pi);
  return g;
}

}  // namespace cvxlines
