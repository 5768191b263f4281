#pragma once

// Coefficient series of an ensemble generating function
//
//   beta(s) = 1 + sum_{l>=1} b_l s^l,     ln beta(s) = sum_{k>=1} a_k s^k,
//
// the Dirichlet-type sums A(sigma) = sum a_k / k^sigma, closed-form
// evaluation of beta for the built-in families, and a grid check of the
// characteristic-function decay condition used by the local limit theorem.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvxlines {

enum class Family { kMultiset, kSelection, kAssembly, kLogRatio, kCustom };

std::string_view to_string(Family family) noexcept;
// Accepts "multiset", "selection", "assembly", "logratio", "custom".
Family family_from_string(std::string_view name);

enum class SeriesKind {
  kB,  // b_0, b_1, ..., indexed from 0
  kA,  // a_1, a_2, ..., indexed from 1
};

// Majorant for the coefficients that were not stored:
//   |a_k| <= scale * ratio^k * k^(-power)   for every k past the truncation.
// `exact` means the bound holds with equality in absolute value, and
// `alternating` that the signs of a_k alternate; both enable sharper tail
// estimates (Euler-Maclaurin for ratio 1, Leibniz remainder).
struct TailEnvelope {
  double scale = 0.0;
  double ratio = 0.0;
  double power = 0.0;
  bool exact = false;
  bool alternating = false;

  bool finite_series() const noexcept { return scale == 0.0 || ratio == 0.0; }
  bool operator==(const TailEnvelope&) const = default;
};

struct CoeffSeries {
  SeriesKind kind = SeriesKind::kA;
  std::vector<double> coeffs;
  // Bound on the sum of |coefficients| that were truncated away
  // (infinity when the envelope does not give one).
  double tail_bound = 0.0;
  std::optional<TailEnvelope> envelope;

  std::size_t truncation_len() const noexcept { return coeffs.size(); }
  // a_k for kind A (k >= 1). Zero past the truncation of a finite series.
  double a(std::size_t k) const;
  // b_l for kind B (l >= 0).
  double b(std::size_t l) const;

  bool operator==(const CoeffSeries&) const = default;
};

struct EnsembleSpec {
  Family family = Family::kMultiset;
  double r = 1.0;
  double rho = 1.0;
  // Only for Family::kCustom; kind A, with an optional tail envelope.
  std::optional<CoeffSeries> custom_a;

  // Throws DomainError when a parameter is outside its family's range.
  void validate() const;

  static EnsembleSpec uniform() { return {}; }
  static EnsembleSpec multiset(double r, double rho) { return {Family::kMultiset, r, rho, {}}; }
  static EnsembleSpec selection(double r, double rho) { return {Family::kSelection, r, rho, {}}; }
  static EnsembleSpec assembly(double r, double rho) { return {Family::kAssembly, r, rho, {}}; }
  static EnsembleSpec logratio(double r, double rho) { return {Family::kLogRatio, r, rho, {}}; }
  static EnsembleSpec custom(CoeffSeries a);

  bool operator==(const EnsembleSpec&) const = default;
};

// Default-parameter instances of the four built-in families:
// uniform, selection(1,1), assembly(1,0), logratio(1,1).
std::vector<EnsembleSpec> builtin_defaults();
std::string describe(const EnsembleSpec& spec);

// a_1..a_K of ln beta. Closed forms for multiset/selection/assembly,
// logratio_a for LogRatio, truncated custom_a for Custom.
CoeffSeries a_coeffs(const EnsembleSpec& spec, std::size_t K);

// Coefficients of the log-ratio family, a_k = r rho^k t_k / k, where the
// normalized sequence t_1 = 1/2, t_2 = 5/12, ... solves
//   (m+1)/(m+2) = t_1/(m+1) + t_2/m + ... + t_m/2 + t_{m+1}.
CoeffSeries logratio_a(double r, double rho, std::size_t K);

struct ExactFraction {
  std::string numerator;
  std::string denominator;
};
inline constexpr std::size_t kLogRatioExactTerms = 64;
// t_1..t_K in exact rational arithmetic (K <= kLogRatioExactTerms).
std::vector<ExactFraction> logratio_normalized_exact(std::size_t K);
// t_1..t_K in floating point: exact rationals rounded for k <= 64, then the
// recurrence with compensated summation. Cached process-wide.
std::vector<double> logratio_normalized(std::size_t K);

// Power-series exponential: l b_l = sum_{k=1}^{l} k a_k b_{l-k}.
// Coefficients past a's truncation count as zero only for a finite series;
// otherwise L is clipped to the truncation length.
CoeffSeries b_from_a(const CoeffSeries& a, std::size_t L);
// Power-series logarithm, inverse of b_from_a. Requires b_0 == 1.
CoeffSeries a_from_b(const CoeffSeries& b, std::size_t K);

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

// A(sigma) = sum a_k k^-sigma and A+(sigma) = sum |a_k| k^-sigma over a
// truncated series, with a certified bound on the omitted tail.
// Throws PrecisionError when the bound exceeds tol.
SeriesValue dirichlet_sum(const CoeffSeries& a, double sigma, double tol);
SeriesValue dirichlet_abs_sum(const CoeffSeries& a, double sigma, double tol);
// Same, choosing the truncation length for the ensemble automatically.
SeriesValue dirichlet_sum(const EnsembleSpec& spec, double sigma, double tol);
SeriesValue dirichlet_abs_sum(const EnsembleSpec& spec, double sigma, double tol);

// Bound on sum_{k>K} scale * (ratio*x)^k * k^-(power + extra_power).
double envelope_tail(const TailEnvelope& env, std::size_t K, double x,
                     double extra_power);

// beta(s) for 0 <= s < 1.
double beta_value(const EnsembleSpec& spec, double s);
double log_beta(const EnsembleSpec& spec, double s);
// Principal branch of ln beta(w) for complex |w| < 1, continuous from w = 0.
std::complex<double> log_beta(const EnsembleSpec& spec, std::complex<double> w);

// Certified bound on sum_{l>L} b_l s^l for nonnegative b (Cauchy estimate).
double b_series_tail_bound(const EnsembleSpec& spec, double s, std::size_t L);

struct Assumption71Result {
  bool holds = false;
  double min_margin = 0.0;
  double worst_theta = 0.0;
  double worst_t = 0.0;
};

// Rounding slack below zero still accepted as "holds".
inline constexpr double kAssumption71Slack = 1e-12;

// Evaluates, at every (theta, t) grid point,
//   margin = -C1 b_1 theta (1 - cos t) - 1/2 ln[beta(theta e^{it}) beta(theta e^{-it}) / beta(theta)^2].
// This is a falsification tool on a finite grid, not a proof.
Assumption71Result check_assumption_71(const EnsembleSpec& spec, double C1,
                                       const std::vector<double>& theta_grid,
                                       const std::vector<double>& t_grid);
// theta in {0.05 j} inside (0,1); t in {0.05 j} inside (0, pi] plus pi.
std::vector<double> default_theta_grid();
std::vector<double> default_t_grid();

}  // namespace cvxlines
