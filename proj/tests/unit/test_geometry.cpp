#include <doctest.h>

#include <cmath>

#include "cvxlines/errors.hpp"
#include "cvxlines/geometry.hpp"
#include "cvxlines/sampler.hpp"
#include "support/oracles.hpp"

using namespace cvxlines;

namespace {

// sup over a dense t grid, including the slope breakpoints from both sides.
double dense_tangential(const PolygonalLine& line, Endpoint n) {
  double best = 0.0;
  auto at = [&](double t) {
    const Point x = xi_t(line, n, t), g = gamma_star(t);
    best = std::max(best, std::hypot(x[0] - g[0], x[1] - g[1]));
  };
  for (int i = 0; i <= 20000; ++i) {
    const double u = i / 20000.0;
    at(u >= 1.0 ? 0.0 : (u <= 0.0 ? kInfinity : 1.0 / u - 1.0));
  }
  for (const Edge& e : line.edges()) {
    if (e.dir.x1 == 0) continue;
    const double s = static_cast<double>(e.dir.x2) * n[0] / (static_cast<double>(e.dir.x1) * n[1]);
    at(s);
    at(std::nextafter(s, 0.0));
  }
  return best;
}

}  // namespace

TEST_CASE("limit arc") {
  CHECK(gamma_star(0.0) == Point{0, 0});
  CHECK(gamma_star(kInfinity) == Point{1, 1});
  CHECK(gamma_star(1.0)[0] == doctest::Approx(0.75));
  CHECK(gamma_star(1.0)[1] == doctest::Approx(0.25));
  for (double t : {0.1, 0.7, 3.0, 40.0}) {
    const Point g = gamma_star(t);
    CHECK(std::sqrt(1 - g[0]) + std::sqrt(g[1]) == doctest::Approx(1.0));
    const Point h = gamma_star_u(1 / (1 + t));
    CHECK(h[0] == doctest::Approx(g[0]).epsilon(1e-14));
  }
}

TEST_CASE("line validation and vertices") {
  CHECK_THROWS_AS(PolygonalLine({Edge{{2, 2}, 1}}), DomainError);
  CHECK_THROWS_AS(PolygonalLine({Edge{{1, 1}, 1}, Edge{{1, 0}, 1}}), DomainError);
  CHECK_THROWS_AS(PolygonalLine({Edge{{1, 0}, 0}}), DomainError);
  const PolygonalLine l({Edge{{1, 0}, 2}, Edge{{1, 2}, 1}});
  CHECK(l.endpoint() == Endpoint{3, 2});
  CHECK(l.key() == "1,0,2;1,2,1");
  CHECK(PolygonalLine().vertices().size() == 1);
}

TEST_CASE("scaled profile") {
  const PolygonalLine l({Edge{{1, 0}, 3}, Edge{{1, 1}, 2}, Edge{{0, 1}, 5}});
  const Endpoint n{10, 10};
  CHECK(xi_t(l, n, kInfinity) == Point{0.5, 0.7});
  CHECK(xi_t(l, n, 0.0) == Point{0.3, 0.0});
  CHECK(xi_t(l, n, 1.0) == Point{0.5, 0.2});
  CHECK(xi_t(l, n, 0.999) == Point{0.3, 0.0});
  const auto rows = profile_rows(l, n, {0.0, 1.0});
  CHECK(rows[1].g[0] == doctest::Approx(0.75));
}

TEST_CASE("tangential distance against a dense grid") {
  const PolygonalLine corner({Edge{{1, 0}, 5}, Edge{{0, 1}, 5}});
  const TangentialDistance d = tangential_report(corner, {5, 5});
  CHECK(d.d_T == doctest::Approx(1.0).epsilon(1e-12));
  const Ensemble e(EnsembleSpec::uniform());
  for (Endpoint n : {Endpoint{200, 200}, Endpoint{100, 300}}) {
    const GrandCanonicalParams p = calibrate(e.spec(), n);
    const FieldSampler fs(e, p, 1e-6);
    for (int r = 0; r < 10; ++r) {
      const PolygonalLine line = assemble(fs.sample(RngStream(9, r)));
      const double exact = tangential_distance(line, n);
      const double dense = dense_tangential(line, n);
      CHECK(exact >= dense - 1e-12);
      CHECK(exact <= dense + 2e-4);
    }
  }
}

TEST_CASE("hausdorff distance") {
  CHECK(hausdorff_distance({{0, 0}, {1, 1}}, {{0, 0}, {1, 1}}) == 0.0);
  CHECK(hausdorff_distance({{0, 0}}, {{3, 4}}) == doctest::Approx(5.0));
  CHECK(hausdorff_distance({{0, 0}, {1, 0}}, {{0, 0.01}, {1, 0.01}}) == doctest::Approx(0.01));
  const std::vector<Point> A{{0, 0}, {0.3, 0.05}, {0.8, 0.4}, {1, 1}};
  const std::vector<Point> B{{0, 0}, {0.5, 0.1}, {0.9, 0.7}, {1, 1}};
  const double h = hausdorff_distance(A, B);
  const double brute = oracle::hausdorff_sampled(A, B, 20000);
  CHECK(h >= brute - 1e-12);
  CHECK(h <= brute + 1e-4);
}

TEST_CASE("arc polyline mesh") {
  const auto poly = gamma_star_polyline(kGammaStarSegments);
  CHECK(poly.size() == kGammaStarSegments + 1);
  CHECK(poly.front() == Point{0, 0});
  CHECK(poly.back() == Point{1, 1});
  CHECK(gamma_star_mesh_error(kGammaStarSegments) < 1e-4);
  const auto fine = gamma_star_polyline(4096);
  CHECK(oracle::hausdorff_sampled(poly, fine, 50) <= gamma_star_mesh_error(kGammaStarSegments));
}

TEST_CASE("hausdorff is dominated by the tangential distance") {
  const Ensemble e(EnsembleSpec::uniform());
  const Endpoint n{1000, 1000};
  const GrandCanonicalParams p = calibrate(e.spec(), n);
  const FieldSampler fs(e, p, 1e-6);
  const auto arc = gamma_star_polyline(kGammaStarSegments);
  for (int r = 0; r < 30; ++r) {
    const PolygonalLine line = assemble(fs.sample(RngStream(21, r)));
    CHECK(hausdorff_distance(scale(line, n).vertices, arc) <=
          tangential_distance(line, n) + gamma_star_mesh_error(kGammaStarSegments));
  }
}
