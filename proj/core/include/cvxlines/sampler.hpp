#pragma once

// Sampling the independent multiplicity field under Q_z and the conditional
// law P_n = Q_z( . | xi = n) by rejection.

#include <cstdint>
#include <vector>

#include "cvxlines/calibration.hpp"
#include "cvxlines/ensemble.hpp"
#include "cvxlines/geometry.hpp"
#include "cvxlines/lattice.hpp"
#include "cvxlines/rng.hpp"

namespace cvxlines {

struct Configuration {
  std::vector<Edge> entries;  // occupied directions in slope order, nu >= 1
  Endpoint endpoint{0, 0};

  // Multiplicities positive and endpoint equal to the recomputed sum.
  bool consistent() const;
};

// Number of inverse-CDF draws that fell past the certified cap and were
// redrawn, process-wide.
std::uint64_t quantile_resamples() noexcept;

// One draw of nu at w in [0,1).
std::int64_t sample_nu(const Ensemble& ensemble, double w, RngStream& rng);

// Per-direction sampler over a fixed direction set. Draw for direction x in
// attempt a uses the key (a, x1, x2), so a different truncation leaves the
// draws on the common directions unchanged.
class FieldSampler {
 public:
  FieldSampler(const Ensemble& ensemble, const GrandCanonicalParams& params, double eps_tail);

  const DirectionSet& directions() const noexcept { return set_; }
  const GrandCanonicalParams& params() const noexcept { return params_; }
  Configuration sample(const RngStream& rng, std::uint64_t attempt = 0) const;

 private:
  const Ensemble& ensemble_;
  GrandCanonicalParams params_;
  DirectionSet set_;
  std::vector<Weight> weights_;
  std::vector<double> p0_;
};

Configuration sample_configuration(const Ensemble& ensemble, const GrandCanonicalParams& params,
                                   double eps_tail, const RngStream& rng,
                                   std::uint64_t attempt = 0);

// Edges x * nu(x) in slope order.
PolygonalLine assemble(const Configuration& config);

struct ConditionedSample {
  PolygonalLine line;
  std::uint64_t attempts = 0;
};

// Rejection sampler for P_n. Each attempt is one Q_z configuration; only
// directions inside the box [0,n1]x[0,n2] can be occupied on the event
// xi = n, and all others are handled through their total occupation
// probability. Occupied directions are located by skipping along the
// cumulative hazard sum ln beta(z^x), which gives the same product law.
class ConditionedSampler {
 public:
  ConditionedSampler(const Ensemble& ensemble, const GrandCanonicalParams& params,
                     double eps_tail = 1e-12);

  // Draws until xi = n; BudgetExhausted after `budget` failed attempts.
  ConditionedSample sample(RngStream& rng, std::uint64_t budget);
  // One Q_z attempt; true iff xi = n exactly.
  bool attempt(RngStream& rng, std::vector<Edge>* edges = nullptr);

  std::uint64_t attempts() const noexcept { return attempts_; }
  std::uint64_t hits() const noexcept { return hits_; }
  double hit_rate() const noexcept {
    return attempts_ ? static_cast<double>(hits_) / static_cast<double>(attempts_) : 0.0;
  }
  // Total of ln beta(z^x) over directions outside the box.
  double outside_hazard() const noexcept { return outside_hazard_; }
  const std::vector<Direction>& box_directions() const noexcept { return dirs_; }

 private:
  const Ensemble& ensemble_;
  GrandCanonicalParams params_;
  std::vector<Direction> dirs_;
  std::vector<Weight> weights_;
  std::vector<double> cum_hazard_;
  double outside_hazard_ = 0.0;
  std::uint64_t attempts_ = 0;
  std::uint64_t hits_ = 0;
};

// P_n draw with z calibrated for n.
ConditionedSample sample_conditioned(const Ensemble& ensemble, Endpoint n, std::uint64_t budget,
                                     RngStream& rng);

}  // namespace cvxlines
