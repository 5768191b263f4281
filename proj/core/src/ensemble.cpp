#include "cvxlines/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cvxlines/errors.hpp"
#include "cvxlines/parallel.hpp"
#include "cvxlines/special.hpp"

namespace cvxlines {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuantileTail = 1e-14;

void check_weight(const Weight& x) {
  if (!(x.w >= 0.0 && x.w < 1.0)) {
    std::ostringstream msg;
    msg << "weight w=" << x.w << " outside [0,1)";
    throw DomainError(msg.str());
  }
}

// 1 - rho*w computed from 1 - w.
double one_minus_rho_w(double rho, const Weight& x) {
  return (1.0 - rho) + rho * x.omw;
}

}  // namespace

Weight Weight::from_exponent(double u) {
  if (!(u >= 0.0)) throw DomainError("weight exponent must be nonnegative");
  return {std::exp(-u), -std::expm1(-u)};
}

Ensemble::Ensemble(EnsembleSpec spec, std::size_t terms) : spec_(std::move(spec)) {
  spec_.validate();
  if (terms < 2) terms = 2;
  a_ = a_coeffs(spec_, terms);
  b_.kind = SeriesKind::kB;
  const double r = spec_.r, rho = spec_.rho;
  switch (spec_.family) {
    case Family::kMultiset:
    case Family::kSelection: {
      const bool sel = spec_.family == Family::kSelection;
      b_.coeffs.assign(terms + 1, 0.0);
      b_.coeffs[0] = 1.0;
      for (std::size_t l = 1; l <= terms; ++l) {
        const double ll = static_cast<double>(l);
        b_.coeffs[l] = b_.coeffs[l - 1] * rho * (sel ? r - ll + 1.0 : r + ll - 1.0) / ll;
      }
      if (sel) {
        support_max_ = static_cast<std::int64_t>(r);
        b_.envelope = TailEnvelope{};
      }
      break;
    }
    case Family::kAssembly:
      if (rho == 0.0) {
        b_.coeffs.assign(terms + 1, 0.0);
        b_.coeffs[0] = 1.0;
        for (std::size_t l = 1; l <= terms; ++l) {
          b_.coeffs[l] = b_.coeffs[l - 1] * r / static_cast<double>(l);
        }
        break;
      }
      [[fallthrough]];
    default:
      b_ = b_from_a(a_, terms);
      break;
  }
  if (!(a1() > 0.0)) throw DomainError("a_1 must be positive");
  for (double v : b_.coeffs) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("ensemble has a negative or non-finite b coefficient");
    }
  }
}

bool Ensemble::closed_ratio() const noexcept {
  return spec_.family == Family::kMultiset || spec_.family == Family::kSelection ||
         (spec_.family == Family::kAssembly && spec_.rho == 0.0);
}

double Ensemble::log_beta(Weight x) const {
  check_weight(x);
  if (x.w == 0.0) return 0.0;
  const double r = spec_.r, rho = spec_.rho;
  const double y = rho * x.w;
  switch (spec_.family) {
    case Family::kMultiset:
      return -r * (y < 0.5 ? std::log1p(-y) : std::log(one_minus_rho_w(rho, x)));
    case Family::kSelection:
      return r * std::log1p(y);
    case Family::kAssembly:
      return r * x.w / one_minus_rho_w(rho, x);
    case Family::kLogRatio:
      if (y < 0.5) return cvxlines::log_beta(spec_, x.w);
      return r * std::log(-std::log(one_minus_rho_w(rho, x)) / y);
    case Family::kCustom:
      break;
  }
  return cvxlines::log_beta(spec_, x.w);
}

double Ensemble::beta(double w) const { return std::exp(log_beta(w)); }

double Ensemble::cumulant(int q, Weight x) const {
  check_weight(x);
  if (q < 1) throw DomainError("cumulant order must be >= 1");
  if (x.w == 0.0) return 0.0;
  const double r = spec_.r, rho = spec_.rho;
  switch (spec_.family) {
    case Family::kMultiset:
      return r * polylog_neg(q - 1, rho * x.w, one_minus_rho_w(rho, x));
    case Family::kSelection:
      return -r * polylog_neg(q - 1, -rho * x.w, 1.0 + rho * x.w);
    case Family::kAssembly:
      if (rho == 0.0) return r * x.w;
      return r / rho * polylog_neg(q, rho * x.w, one_minus_rho_w(rho, x));
    default:
      break;
  }
  // Direct summation against the tail envelope.
  const std::optional<TailEnvelope>& env = a_.envelope;
  CompensatedSum acc;
  double wk = 1.0;
  const std::size_t K = a_.coeffs.size();
  for (std::size_t k = 1; k <= K; ++k) {
    wk *= x.w;
    if (wk == 0.0) return acc.value();
    const double kq = std::pow(static_cast<double>(k), q);
    acc.add(kq * a_.coeffs[k - 1] * wk);
    if (k % 32 == 0 || k == K) {
      const double tail = env ? envelope_tail(*env, k, x.w, -static_cast<double>(q)) : kInf;
      if (tail <= 1e-17 * std::fabs(acc.value())) return acc.value();
    }
  }
  if (env && env->finite_series()) return acc.value();
  std::ostringstream msg;
  msg << "cumulant series of order " << q << " at w=" << x.w << " not converged within "
      << K << " terms";
  throw PrecisionError(msg.str());
}

double Ensemble::abs_cumulant(int q, Weight x) const {
  if (spec_.family == Family::kSelection) {
    check_weight(x);
    if (x.w == 0.0) return 0.0;
    return spec_.r * polylog_neg(q - 1, spec_.rho * x.w, one_minus_rho_w(spec_.rho, x));
  }
  if (spec_.family == Family::kCustom) {
    // Custom coefficients may have either sign.
    check_weight(x);
    CompensatedSum acc;
    double wk = 1.0;
    for (std::size_t k = 1; k <= a_.coeffs.size(); ++k) {
      wk *= x.w;
      acc.add(std::pow(static_cast<double>(k), q) * std::fabs(a_.coeffs[k - 1]) * wk);
    }
    const double tail = a_.envelope
                            ? envelope_tail(*a_.envelope, a_.coeffs.size(), x.w, -static_cast<double>(q))
                            : kInf;
    if (!(tail <= 1e-12 * std::max(acc.value(), 1e-300))) {
      throw PrecisionError("custom absolute cumulant tail not certified");
    }
    return acc.value() + tail;
  }
  return cumulant(q, x);
}

double Ensemble::pmf(std::int64_t l, double w) const {
  check_weight(Weight::of(w));
  if (l < 0) return 0.0;
  if (support_max_ >= 0 && l > support_max_) return 0.0;
  if (w == 0.0) return l == 0 ? 1.0 : 0.0;
  const double lb = log_beta(w);
  if (l == 0) return std::exp(-lb);
  const double ll = static_cast<double>(l);
  const double r = spec_.r, rho = spec_.rho;
  switch (spec_.family) {
    case Family::kMultiset:
      return std::exp(std::lgamma(r + ll) - std::lgamma(r) - std::lgamma(ll + 1.0) +
                      ll * std::log(rho * w) - lb);
    case Family::kSelection:
      return std::exp(std::lgamma(r + 1.0) - std::lgamma(r - ll + 1.0) -
                      std::lgamma(ll + 1.0) + ll * std::log(rho * w) - lb);
    default:
      break;
  }
  const double bl = b_.b(static_cast<std::size_t>(l));
  if (bl == 0.0) return 0.0;
  return std::exp(std::log(bl) + ll * std::log(w) - lb);
}

double Ensemble::tail_mass_after(std::int64_t l, double w, double log_beta_w) const {
  if (support_max_ >= 0 && l >= support_max_) return 0.0;
  double best = kInf;
  for (double f : {0.1, 0.25, 0.5, 0.75}) {
    const double R = w + (1.0 - w) * f;
    const double v = w / R;
    const double bound =
        std::exp(log_beta(R) - log_beta_w + static_cast<double>(l + 1) * std::log(v)) / (1.0 - v);
    best = std::min(best, bound);
  }
  return best;
}

namespace {

// Walks the pmf l = 0, 1, 2, ... with p_l kept in log space when needed.
class PmfWalk {
 public:
  PmfWalk(const Ensemble& e, double w)
      : e_(e), w_(w), log_w_(std::log(w)), log_beta_(e.log_beta(w)) {
    const EnsembleSpec& s = e.spec();
    closed_ = s.family == Family::kMultiset || s.family == Family::kSelection ||
              (s.family == Family::kAssembly && s.rho == 0.0);
    log_p_ = -log_beta_;
    p_ = std::exp(log_p_);
  }

  std::int64_t l() const noexcept { return l_; }
  double p() const noexcept { return p_; }
  double log_beta() const noexcept { return log_beta_; }
  bool at_end() const noexcept {
    return e_.support_max() >= 0 && l_ >= e_.support_max();
  }

  void step() {
    const EnsembleSpec& s = e_.spec();
    const double ll = static_cast<double>(l_);
    if (closed_) {
      double ratio = 0.0;
      if (s.family == Family::kMultiset) {
        ratio = s.rho * w_ * (s.r + ll) / (ll + 1.0);
      } else if (s.family == Family::kSelection) {
        ratio = s.rho * w_ * (s.r - ll) / (ll + 1.0);
      } else {
        ratio = s.r * w_ / (ll + 1.0);
      }
      ++l_;
      if (ratio <= 0.0) {
        log_p_ = -std::numeric_limits<double>::infinity();
        p_ = 0.0;
        return;
      }
      log_p_ += std::log(ratio);
      p_ = std::exp(log_p_);
      return;
    }
    ++l_;
    const std::size_t idx = static_cast<std::size_t>(l_);
    if (idx >= e_.b_series().coeffs.size()) {
      throw PrecisionError("multiplicity beyond the coefficient table; increase terms");
    }
    const double bl = e_.b_series().coeffs[idx];
    p_ = bl > 0.0 ? std::exp(std::log(bl) + static_cast<double>(l_) * log_w_ - log_beta_) : 0.0;
  }

 private:
  const Ensemble& e_;
  double w_;
  double log_w_;
  double log_beta_;
  bool closed_ = false;
  std::int64_t l_ = 0;
  double log_p_ = 0.0;
  double p_ = 0.0;
};

}  // namespace

double Ensemble::abs_central_moment3(double w) const {
  check_weight(Weight::of(w));
  if (w == 0.0) return 0.0;
  const double m = cumulant(1, w);
  PmfWalk walk(*this, w);
  CompensatedSum acc;
  for (;;) {
    const double d = std::fabs(static_cast<double>(walk.l()) - m);
    acc.add(d * d * d * walk.p());
    if (walk.at_end()) return acc.value();
    const double ll = static_cast<double>(walk.l());
    if (ll > m + 1.0 && walk.l() % 16 == 0) {
      // sum_{j>l} (j+m)^3 p_j <= sum_{j>l} (j+m)^3 (beta(R)/beta(w)) (w/R)^j
      double best = kInf;
      for (double f : {0.1, 0.25, 0.5}) {
        const double R = w + (1.0 - w) * f;
        const double v = w / R;
        const double q = std::pow((ll + 2.0 + m) / (ll + 1.0 + m), 3) * v;
        if (q >= 1.0) continue;
        const double first = std::pow(ll + 1.0 + m, 3) *
                             std::exp(log_beta(R) - walk.log_beta() + (ll + 1.0) * std::log(v));
        best = std::min(best, first / (1.0 - q));
      }
      if (best <= 1e-15 * acc.value()) return acc.value();
    }
    walk.step();
  }
}

std::int64_t Ensemble::quantile(double u, Weight x) const {
  check_weight(x);
  if (x.w == 0.0) return 0;
  PmfWalk walk(*this, x.w);
  double cdf = walk.p();
  while (u >= cdf) {
    if (walk.at_end()) return walk.l();
    if (walk.l() % 32 == 31 &&
        tail_mass_after(walk.l(), x.w, walk.log_beta()) < kQuantileTail) {
      return -1;
    }
    walk.step();
    cdf += walk.p();
  }
  return walk.l();
}

std::int64_t Ensemble::quantile_positive(double u, Weight x) const {
  check_weight(x);
  if (x.w == 0.0) throw DomainError("nu >= 1 has probability zero at w = 0");
  PmfWalk walk(*this, x.w);
  const double positive_mass = -std::expm1(-walk.log_beta());
  walk.step();
  double cdf = walk.p() / positive_mass;
  while (u >= cdf) {
    if (walk.at_end()) return walk.l();
    if (walk.l() % 32 == 31 &&
        tail_mass_after(walk.l(), x.w, walk.log_beta()) < kQuantileTail * positive_mass) {
      return -1;
    }
    walk.step();
    cdf += walk.p() / positive_mass;
  }
  return walk.l();
}

}  // namespace cvxlines
