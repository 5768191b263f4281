#pragma once

// Exact small-n ground truth: enumeration of the convex lattice lines ending
// at n, their weights, the partition function B_n and Q_z{xi = n}.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cvxlines/calibration.hpp"
#include "cvxlines/ensemble.hpp"
#include "cvxlines/geometry.hpp"

namespace cvxlines {

inline constexpr double kMaxEnumeratedLines = 1e7;

struct ExactDistribution {
  Endpoint n{0, 0};
  std::vector<PolygonalLine> lines;  // positive-weight lines only
  std::vector<double> weights;
  double total = 0.0;  // B_n
  std::vector<double> probabilities;
};

// Number of convex lattice lines from 0 to n, by dynamic programming over
// directions in slope order.
double count_cpn(Endpoint n);

// Every convex lattice line from 0 to n, in lexicographic DFS order over
// directions sorted by slope. ResourceError when the count exceeds
// kMaxEnumeratedLines.
std::vector<PolygonalLine> enumerate_cpn(Endpoint n);

// b(Gamma) = product of b_{nu(x)} over occupied directions.
double weight(const PolygonalLine& line, const Ensemble& ensemble);

// B_m for every 0 <= m <= n componentwise, row-major in m1: index m1*(n2+1)+m2.
std::vector<double> partition_table(Endpoint n, const Ensemble& ensemble);
double partition_function(Endpoint n, const Ensemble& ensemble);

ExactDistribution exact_pn(Endpoint n, const Ensemble& ensemble);

// ln beta~(z) = sum over all directions of ln beta(z^x), truncated with a
// certified tail <= eps_tail (the truncation error itself is returned).
Estimate log_beta_tilde(const Ensemble& ensemble, const GrandCanonicalParams& params,
                        double eps_tail);

// Q_z{xi = n} = B_n z^n / beta~(z). The true value lies in
// [value * exp(-tail_bound), value].
Estimate exact_q_endpoint(Endpoint n, const Ensemble& ensemble,
                          const GrandCanonicalParams& params, double eps_tail);
// Q_z(Gamma) = b(Gamma) z^xi / beta~(z) for a single line.
double exact_q_line(const PolygonalLine& line, const Ensemble& ensemble,
                    const GrandCanonicalParams& params, double eps_tail);

// 1/2 sum |p_hat - p| over the exact support; DataError on keys outside it.
double tv_distance(const std::map<std::string, std::uint64_t>& empirical,
                   const ExactDistribution& exact);

}  // namespace cvxlines
