#pragma once

// Precomputed coefficient tables for one ensemble, plus the per-direction
// quantities of the multiplicity nu(x) ~ b_l w^l / beta(w), w = z^x.

#include <cstddef>
#include <cstdint>

#include "cvxlines/series.hpp"

namespace cvxlines {

// A point w in [0,1) carried together with 1 - w, so that 1 - w stays
// accurate when w = exp(-u) with small u.
struct Weight {
  double w = 0.0;
  double omw = 1.0;

  static Weight of(double w) { return {w, 1.0 - w}; }
  // w = exp(-u), u >= 0.
  static Weight from_exponent(double u);
};

class Ensemble {
 public:
  static constexpr std::size_t kDefaultTerms = 8192;

  explicit Ensemble(EnsembleSpec spec, std::size_t terms = kDefaultTerms);

  const EnsembleSpec& spec() const noexcept { return spec_; }
  std::size_t terms() const noexcept { return a_.coeffs.size(); }
  const CoeffSeries& a_series() const noexcept { return a_; }
  const CoeffSeries& b_series() const noexcept { return b_; }
  double a1() const noexcept { return a_.coeffs[0]; }
  double b(std::size_t l) const { return b_.b(l); }
  // Largest possible multiplicity, or -1 when unbounded.
  std::int64_t support_max() const noexcept { return support_max_; }

  double log_beta(Weight x) const;
  double log_beta(double w) const { return log_beta(Weight::of(w)); }
  double beta(double w) const;

  // kappa_q(w) = sum_k k^q a_k w^k, the q-th cumulant of nu at w (q >= 1).
  double cumulant(int q, Weight x) const;
  double cumulant(int q, double w) const { return cumulant(q, Weight::of(w)); }
  // sum_k k^q |a_k| w^k.
  double abs_cumulant(int q, Weight x) const;
  double abs_cumulant(int q, double w) const { return abs_cumulant(q, Weight::of(w)); }

  // Q{nu = l} at w.
  double pmf(std::int64_t l, double w) const;
  // E|nu - E nu|^3 at w, summed from the pmf with a certified tail.
  double abs_central_moment3(double w) const;
  // Smallest l with P{nu <= l} > u, or -1 when u falls beyond the point
  // where the certified remaining mass is below 1e-14.
  std::int64_t quantile(double u, Weight x) const;
  // Same for the law of nu given nu >= 1 (requires w > 0).
  std::int64_t quantile_positive(double u, Weight x) const;

 private:
  bool closed_ratio() const noexcept;
  double tail_mass_after(std::int64_t l, double w, double log_beta_w) const;

  EnsembleSpec spec_;
  CoeffSeries a_;
  CoeffSeries b_;
  std::int64_t support_max_ = -1;
};

}  // namespace cvxlines
