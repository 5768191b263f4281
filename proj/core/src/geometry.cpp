#include "cvxlines/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cvxlines/errors.hpp"

namespace cvxlines {

namespace {

double dist2(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  double s = 0.0;
  if (len2 > 0.0) {
    s = ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2;
    s = std::clamp(s, 0.0, 1.0);
  }
  const Point q{a[0] + s * vx, a[1] + s * vy};
  return std::sqrt(dist2(p, q));
}

double point_polyline_distance(const Point& p, const std::vector<Point>& B) {
  if (B.size() == 1) return std::sqrt(dist2(p, B[0]));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < B.size(); ++i) {
    best = std::min(best, point_segment_distance(p, B[i], B[i + 1]));
  }
  return best;
}

// sup over A of the distance to B.
double directed_hausdorff(const std::vector<Point>& A, const std::vector<Point>& B, double tol) {
  double best = 0.0;
  for (const auto& p : A) best = std::max(best, point_polyline_distance(p, B));
  struct Piece {
    Point a, b;
    double fa, fb;
  };
  std::vector<Piece> stack;
  for (std::size_t i = 0; i + 1 < A.size(); ++i) {
    stack.push_back({A[i], A[i + 1], point_polyline_distance(A[i], B),
                     point_polyline_distance(A[i + 1], B)});
  }
  while (!stack.empty()) {
    const Piece pc = stack.back();
    stack.pop_back();
    const double len = std::sqrt(dist2(pc.a, pc.b));
    // f is 1-Lipschitz along the segment: max <= (fa + fb + len)/2
    if (0.5 * (pc.fa + pc.fb + len) <= best + tol) continue;
    // distance to each segment of B is convex along the piece
    double convex_bound = std::sqrt(std::max(dist2(pc.a, B[0]), dist2(pc.b, B[0])));
    for (std::size_t j = 0; j + 1 < B.size(); ++j) {
      convex_bound = std::min(convex_bound, std::max(point_segment_distance(pc.a, B[j], B[j + 1]),
                                                     point_segment_distance(pc.b, B[j], B[j + 1])));
    }
    if (convex_bound <= best + tol) continue;
    const Point mid{0.5 * (pc.a[0] + pc.b[0]), 0.5 * (pc.a[1] + pc.b[1])};
    const double fm = point_polyline_distance(mid, B);
    best = std::max(best, fm);
    stack.push_back({pc.a, mid, pc.fa, fm});
    stack.push_back({mid, pc.b, fm, pc.fb});
  }
  return best;
}

// Real roots in (lo, hi) of 2u^3 - 3u^2 + c u + d, found by bisection on the
// monotone pieces between the cubic's own critical points.
std::vector<double> cubic_roots_in(double c, double d, double lo, double hi) {
  auto f = [&](double u) { return ((2.0 * u - 3.0) * u + c) * u + d; };
  std::vector<double> cuts{lo};
  // f'(u) = 6u^2 - 6u + c
  const double disc = 36.0 - 24.0 * c;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    for (double r : {(6.0 - s) / 12.0, (6.0 + s) / 12.0}) {
      if (r > lo && r < hi) cuts.push_back(r);
    }
  }
  cuts.push_back(hi);
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    double fa = f(a), fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if ((fa > 0.0) == (fb > 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if ((fm > 0.0) == (fa > 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

}  // namespace

PolygonalLine::PolygonalLine(std::vector<Edge> edges) : edges_(std::move(edges)) {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.mult < 1) throw DomainError("edge multiplicity must be positive");
    if (e.dir.x1 < 0 || e.dir.x2 < 0 || std::gcd(e.dir.x1, e.dir.x2) != 1) {
      throw DomainError("edge direction must be a coprime nonnegative vector");
    }
    if (i > 0 && !slope_less(edges_[i - 1].dir, e.dir)) {
      throw DomainError("edge slopes must be strictly increasing");
    }
    endpoint_[0] += e.dir.x1 * e.mult;
    endpoint_[1] += e.dir.x2 * e.mult;
  }
}

std::vector<Endpoint> PolygonalLine::vertices() const {
  std::vector<Endpoint> v{{0, 0}};
  for (const Edge& e : edges_) {
    const Endpoint& last = v.back();
    v.push_back({last[0] + e.dir.x1 * e.mult, last[1] + e.dir.x2 * e.mult});
  }
  return v;
}

std::string PolygonalLine::key() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i) out << ';';
    out << edges_[i].dir.x1 << ',' << edges_[i].dir.x2 << ',' << edges_[i].mult;
  }
  return out.str();
}

ScaledPath scale(const PolygonalLine& line, Endpoint n) {
  if (n[0] < 1 || n[1] < 1) throw DomainError("scaling needs positive n");
  ScaledPath p;
  const double n1 = static_cast<double>(n[0]), n2 = static_cast<double>(n[1]);
  for (const auto& v : line.vertices()) {
    p.vertices.push_back({static_cast<double>(v[0]) / n1, static_cast<double>(v[1]) / n2});
  }
  p.endpoint = p.vertices.back();
  return p;
}

Point gamma_star_u(double u) {
  const double v = 1.0 - u;
  return {(1.0 - u) * (1.0 + u), v * v};
}

Point gamma_star(double t) {
  if (!(t >= 0.0)) throw DomainError("gamma_star needs t in [0, inf]");
  if (std::isinf(t)) return {1.0, 1.0};
  return gamma_star_u(1.0 / (1.0 + t));
}

Point xi_t(const PolygonalLine& line, Endpoint n, double t) {
  if (!(t >= 0.0)) throw DomainError("xi_t needs t in [0, inf]");
  if (n[0] < 1 || n[1] < 1) throw DomainError("xi_t needs positive n");
  std::int64_t s1 = 0, s2 = 0;
  const double n1 = static_cast<double>(n[0]), n2 = static_cast<double>(n[1]);
  for (const Edge& e : line.edges()) {
    const bool inside = std::isinf(t) ||
                        static_cast<double>(e.dir.x2) * n1 <= t * static_cast<double>(e.dir.x1) * n2;
    if (!inside) break;
    s1 += e.dir.x1 * e.mult;
    s2 += e.dir.x2 * e.mult;
  }
  return {static_cast<double>(s1) / n1, static_cast<double>(s2) / n2};
}

TangentialDistance tangential_report(const PolygonalLine& line, Endpoint n) {
  const ScaledPath sp = scale(line, n);
  const double n1 = static_cast<double>(n[0]), n2 = static_cast<double>(n[1]);
  // Breakpoints u_i = x1 n2 / (x1 n2 + x2 n1), decreasing along the edges.
  const std::size_t m = line.size();
  std::vector<double> u(m + 2);
  u[0] = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Direction& d = line.edges()[i].dir;
    const double a = static_cast<double>(d.x1) * n2, b = static_cast<double>(d.x2) * n1;
    u[i + 1] = a / (a + b);
  }
  u[m + 1] = 0.0;
  TangentialDistance rep;
  double best2 = -1.0;
  for (std::size_t k = 0; k <= m; ++k) {
    // xi equals vertex k for u in (u_{k+1}, u_k]; the last piece is [0, u_m].
    const double hi = u[k], lo = u[k + 1];
    if (k == 0 && m > 0 && hi <= lo) continue;  // a horizontal first edge covers t = 0
    const Point v = sp.vertices[k];
    std::vector<double> cand{lo, hi};
    for (double r : cubic_roots_in(2.0 + v[0] - v[1], v[1] - 1.0, lo, hi)) cand.push_back(r);
    for (double uu : cand) {
      const Point g = gamma_star_u(uu);
      const double d2 = dist2(v, g);
      if (d2 > best2) {
        best2 = d2;
        rep.worst_t = uu == 0.0 ? kInfinity : 1.0 / uu - 1.0;
      }
    }
    // Coordinates of g are monotone in u: interval ends suffice.
    for (double uu : {lo, hi}) {
      const Point g = gamma_star_u(uu);
      rep.sup1 = std::max(rep.sup1, std::fabs(v[0] - g[0]));
      rep.sup2 = std::max(rep.sup2, std::fabs(v[1] - g[1]));
    }
  }
  rep.d_T = std::sqrt(std::max(best2, 0.0));
  return rep;
}

double tangential_distance(const PolygonalLine& line, Endpoint n) {
  return tangential_report(line, n).d_T;
}

double hausdorff_distance(const std::vector<Point>& A, const std::vector<Point>& B, double tol) {
  if (A.empty() || B.empty()) throw DomainError("Hausdorff distance needs nonempty polylines");
  return std::max(directed_hausdorff(A, B, tol), directed_hausdorff(B, A, tol));
}

std::vector<Point> gamma_star_polyline(std::size_t segments) {
  if (segments == 0) throw DomainError("need at least one segment");
  std::vector<Point> pts;
  pts.reserve(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) {
    const double u = 1.0 - static_cast<double>(i) / static_cast<double>(segments);
    pts.push_back(gamma_star_u(u));
  }
  pts.front() = {0.0, 0.0};
  pts.back() = {1.0, 1.0};
  return pts;
}

double gamma_star_mesh_error(std::size_t segments) {
  // |g''| = 2 sqrt 2; chord deviation <= |g''| h^2 / 8
  const double h = 1.0 / static_cast<double>(segments);
  return std::sqrt(2.0) * h * h / 4.0;
}

std::vector<ProfileRow> profile_rows(const PolygonalLine& line, Endpoint n,
                                     const std::vector<double>& t_grid) {
  std::vector<ProfileRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) rows.push_back({t, xi_t(line, n, t), gamma_star(t)});
  return rows;
}

}  // namespace cvxlines
