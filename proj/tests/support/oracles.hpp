#pragma once

// Brute-force reference computations for the tests. Nothing here calls into
// the library's algorithms; everything is done the slow, obvious way.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace oracle {

using Vec = std::array<std::int64_t, 2>;
using Line = std::vector<Vec>;  // edge vectors in slope order

// Every convex lattice line from 0 to n, as the list of its edge vectors.
// An edge vector is any nonzero v >= 0; consecutive vectors must turn
// strictly counterclockwise (cross product > 0).
inline std::vector<Line> brute_lines(Vec n) {
  std::vector<Vec> vecs;
  for (std::int64_t a = 0; a <= n[0]; ++a)
    for (std::int64_t b = 0; b <= n[1]; ++b)
      if (a || b) vecs.push_back({a, b});
  std::vector<Line> out;
  Line cur;
  std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t r1, std::int64_t r2) {
    if (r1 == 0 && r2 == 0) {
      out.push_back(cur);
      return;
    }
    for (const Vec& v : vecs) {
      if (v[0] > r1 || v[1] > r2) continue;
      if (!cur.empty()) {
        const Vec& p = cur.back();
        if (p[0] * v[1] - p[1] * v[0] <= 0) continue;
      }
      cur.push_back(v);
      rec(r1 - v[0], r2 - v[1]);
      cur.pop_back();
    }
  };
  rec(n[0], n[1]);
  return out;
}

inline std::int64_t gcd(std::int64_t a, std::int64_t b) { return b == 0 ? a : gcd(b, a % b); }

// "x1,x2,nu;..." with x the primitive direction of each edge vector.
inline std::string key_of(const Line& line) {
  std::string s;
  for (const Vec& v : line) {
    const std::int64_t g = gcd(v[0], v[1]);
    if (!s.empty()) s += ';';
    s += std::to_string(v[0] / g) + "," + std::to_string(v[1] / g) + "," + std::to_string(g);
  }
  return s;
}

inline int mobius_trial(std::int64_t m) {
  int mu = 1;
  for (std::int64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    m /= p;
    if (m % p == 0) return 0;
    mu = -mu;
  }
  return m > 1 ? -mu : mu;
}

// Truncated power series helpers on coefficient vectors c[0..L].
using Poly = std::vector<double>;

inline Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// exp(f) for f[0] = 0 as sum_m f^m / m!, plain Taylor expansion.
inline Poly exp_taylor(const Poly& f) {
  Poly out(f.size(), 0.0), term(f.size(), 0.0);
  out[0] = term[0] = 1.0;
  for (std::size_t m = 1; m < f.size(); ++m) {
    term = mul(term, f);
    for (double& t : term) t /= static_cast<double>(m);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] += term[i];
  }
  return out;
}

// b_l of the negative binomial (1 - rho s)^-r.
inline Poly multiset_b(double r, double rho, std::size_t L) {
  Poly b(L + 1);
  b[0] = 1.0;
  for (std::size_t l = 1; l <= L; ++l) b[l] = b[l - 1] * (r + l - 1.0) / l * rho;
  return b;
}

// b_l of (1 + rho s)^r.
inline Poly selection_b(double r, double rho, std::size_t L) {
  Poly b(L + 1);
  b[0] = 1.0;
  for (std::size_t l = 1; l <= L; ++l) b[l] = b[l - 1] * (r - (l - 1.0)) / l * rho;
  return b;
}

// Points spaced evenly along each segment of a polyline.
inline std::vector<std::array<double, 2>> densify(const std::vector<std::array<double, 2>>& p,
                                                  int per_segment) {
  std::vector<std::array<double, 2>> out;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    for (int k = 0; k < per_segment; ++k) {
      const double s = static_cast<double>(k) / per_segment;
      out.push_back({p[i][0] + s * (p[i + 1][0] - p[i][0]), p[i][1] + s * (p[i + 1][1] - p[i][1])});
    }
  }
  out.push_back(p.back());
  return out;
}

inline double point_segment(std::array<double, 2> q, std::array<double, 2> a, std::array<double, 2> b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0 ? ((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(q[0] - a[0] - s * dx, q[1] - a[1] - s * dy);
}

inline double point_polyline(std::array<double, 2> q, const std::vector<std::array<double, 2>>& p) {
  double best = std::hypot(q[0] - p[0][0], q[1] - p[0][1]);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) best = std::min(best, point_segment(q, p[i], p[i + 1]));
  return best;
}

// Hausdorff distance from dense samples of both curves; an underestimate by
// at most half the sample spacing.
inline double hausdorff_sampled(const std::vector<std::array<double, 2>>& A,
                                const std::vector<std::array<double, 2>>& B, int per_segment) {
  double h = 0.0;
  for (const auto& q : densify(A, per_segment)) h = std::max(h, point_polyline(q, B));
  for (const auto& q : densify(B, per_segment)) h = std::max(h, point_polyline(q, A));
  return h;
}

// Direct double sum of sum_{x coprime} x_j f(alpha . x) over the box
// x_i <= cut.
template <class F>
std::array<double, 2> lattice_sum(std::array<double, 2> alpha, std::int64_t cut, F f) {
  long double s1 = 0, s2 = 0;
  for (std::int64_t a = 0; a <= cut; ++a)
    for (std::int64_t b = 0; b <= cut; ++b) {
      if (gcd(a, b) != 1) continue;
      const double v = f(alpha[0] * a + alpha[1] * b);
      s1 += a * v;
      s2 += b * v;
    }
  return {static_cast<double>(s1), static_cast<double>(s2)};
}

}  // namespace oracle
