#pragma once

// Coprime direction set, Moebius function and lattice tail bounds.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cvxlines {

class Ensemble;

__extension__ typedef __int128 int128_t;

// Exact slope num/den with den == 0 meaning +infinity. Compared by cross
// products, never through floating point.
struct Slope {
  std::int64_t num = 0;
  std::int64_t den = 1;

  std::strong_ordering operator<=>(const Slope& o) const noexcept {
    const int128_t lhs = static_cast<int128_t>(num) * o.den;
    const int128_t rhs = static_cast<int128_t>(o.num) * den;
    if (den == 0 && o.den == 0) return std::strong_ordering::equal;
    if (den == 0) return std::strong_ordering::greater;
    if (o.den == 0) return std::strong_ordering::less;
    return lhs <=> rhs;
  }
  bool operator==(const Slope& o) const noexcept { return (*this <=> o) == 0; }
};

struct Direction {
  std::int64_t x1 = 1;
  std::int64_t x2 = 0;

  Slope slope() const noexcept { return {x2, x1}; }
  bool operator==(const Direction&) const = default;
};

// Strict slope order; on coprime directions it is total.
inline bool slope_less(const Direction& a, const Direction& b) noexcept {
  return a.slope() < b.slope();
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) noexcept;

struct DirectionSet {
  std::vector<Direction> dirs;  // sorted by slope ascending
  std::array<double, 2> alpha{};
  double cutoff = 0.0;           // T: every x with alpha.x <= T is present
  double tail_mass_bound = 0.0;  // >= sum over excluded x of (beta(z^x) - 1)

  std::size_t size() const noexcept { return dirs.size(); }
};

inline constexpr std::int64_t kMobiusSieveBound = 1000000;
inline constexpr std::size_t kDefaultMaxDirections = 60000000;

// mu(m) for m >= 1; sieve up to kMobiusSieveBound, trial division beyond.
int mobius(std::int64_t m);

// All coprime x >= 0 with alpha.x <= T, sorted by slope.
DirectionSet directions_within(std::array<double, 2> alpha, double T,
                               std::size_t max_dirs = kDefaultMaxDirections);

// All coprime x with 0 <= x_j <= n_j, sorted by slope.
std::vector<Direction> directions_in_box(std::int64_t n1, std::int64_t n2);

// Upper bound on sum over x in Z_+^2 with alpha.x > T of
// x1^p1 x2^p2 exp(-alpha.x), from exp(-lambda alpha.x) <= exp(-lambda T)
// optimized over lambda in (0,1).
double lattice_exp_tail(int p1, int p2, std::array<double, 2> alpha, double T);

// Smallest cutoff T on the grid {0.25 j} with the certified bound on
// sum_{excluded} (beta(z^x) - 1) <= eps_tail, and the directions within it.
// z_j = exp(-alpha_j). Throws ResourceError when the set would exceed
// max_dirs entries.
DirectionSet enumerate_directions(std::array<double, 2> alpha, const Ensemble& ensemble,
                                  double eps_tail,
                                  std::size_t max_dirs = kDefaultMaxDirections);

// Cutoff chosen by enumerate_directions, without materializing the set.
double direction_cutoff(std::array<double, 2> alpha, const Ensemble& ensemble,
                        double eps_tail, double* tail_bound = nullptr);

// sum_{m>=1} mu(m) m^-sigma = 1/zeta(sigma) by partial summation with a
// p-series tail bound <= tol.
double mobius_dirichlet(double sigma, double tol);

// Debug dump, one "x1,x2" row per direction.
void write_csv(std::ostream& out, const DirectionSet& set);

}  // namespace cvxlines
