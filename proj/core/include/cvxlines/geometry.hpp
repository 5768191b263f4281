#pragma once

// Convex lattice polygonal lines, the limit parabola arc and the two
// distances between them.
//
// The arc is handled in the parameter u = 1/(1+t) in [0,1], where it reads
// g(u) = (1 - u^2, (1 - u)^2); t = 0 is u = 1 and t = infinity is u = 0.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cvxlines/calibration.hpp"
#include "cvxlines/lattice.hpp"

namespace cvxlines {

struct Edge {
  Direction dir;
  std::int64_t mult = 1;

  bool operator==(const Edge&) const = default;
};

class PolygonalLine {
 public:
  PolygonalLine() = default;  // the trivial line at the origin
  // Edges must have coprime directions, strictly increasing slopes and
  // positive multiplicities; DomainError otherwise.
  explicit PolygonalLine(std::vector<Edge> edges);

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }
  Endpoint endpoint() const noexcept { return endpoint_; }
  // (0,0) followed by the cumulative edge sums.
  std::vector<Endpoint> vertices() const;
  // Canonical encoding "x1,x2,nu;x1,x2,nu;..." in slope order.
  std::string key() const;

  bool operator==(const PolygonalLine& o) const { return edges_ == o.edges_; }

 private:
  std::vector<Edge> edges_;
  Endpoint endpoint_{0, 0};
};

struct ScaledPath {
  std::vector<Point> vertices;
  Point endpoint{};
};

ScaledPath scale(const PolygonalLine& line, Endpoint n);

// g*(t) = ((t^2+2t)/(1+t)^2, t^2/(1+t)^2); t = kInfinity gives (1,1).
Point gamma_star(double t);
Point gamma_star_u(double u);

// Scaled endpoint of the edges with x2/x1 <= t n2/n1.
Point xi_t(const PolygonalLine& line, Endpoint n, double t);

struct TangentialDistance {
  double d_T = 0.0;    // Euclidean sup over t of |xi(t) - g*(t)|
  double sup1 = 0.0;   // sup over t of |xi_1(t) - g*_1(t)|
  double sup2 = 0.0;   // sup over t of |xi_2(t) - g*_2(t)|
  double worst_t = 0.0;
};

TangentialDistance tangential_report(const PolygonalLine& line, Endpoint n);
double tangential_distance(const PolygonalLine& line, Endpoint n);

// Hausdorff distance between two polylines given as ordered vertex lists.
// Point-to-polyline distances are exact; the supremum along each segment is
// located by Lipschitz branch and bound to within `tol`.
double hausdorff_distance(const std::vector<Point>& A, const std::vector<Point>& B,
                          double tol = 1e-10);

// Vertices of gamma* at uniform u-spacing, from (0,0) to (1,1).
std::vector<Point> gamma_star_polyline(std::size_t segments);
// Bound on the Hausdorff distance between gamma* and that polyline.
double gamma_star_mesh_error(std::size_t segments);
// Default mesh, with error below 1e-4.
inline constexpr std::size_t kGammaStarSegments = 64;

struct ProfileRow {
  double t = 0.0;
  Point xi{};
  Point g{};
};
std::vector<ProfileRow> profile_rows(const PolygonalLine& line, Endpoint n,
                                     const std::vector<double>& t_grid);

}  // namespace cvxlines
