#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvxlines/calibration.hpp"
#include "cvxlines/errors.hpp"
#include "support/oracles.hpp"

using namespace cvxlines;

namespace {

double zeta3_partial() {
  double s = 0.0;
  for (int k = 1000000; k >= 1; --k) s += 1.0 / (static_cast<double>(k) * k * k);
  return s + 0.5e-12;  // integral tail 1/(2N^2)
}

}  // namespace

TEST_CASE("kappa") {
  const double z2 = std::numbers::pi * std::numbers::pi / 6;
  const double ku = kappa(EnsembleSpec::uniform(), 1e-12);
  CHECK(ku == doctest::Approx(std::cbrt(zeta3_partial() / z2)).epsilon(1e-10));
  CHECK(ku == doctest::Approx(0.90068).epsilon(1e-4));
  CHECK(kappa(EnsembleSpec::assembly(1, 0)) == doctest::Approx(std::cbrt(6 / (std::numbers::pi * std::numbers::pi))).epsilon(1e-12));
  CHECK(kappa(EnsembleSpec::assembly(1, 0)) == doctest::Approx(0.84713).epsilon(1e-5));
  for (const EnsembleSpec& spec : builtin_defaults()) {
    const double k = kappa(spec);
    CHECK(k * k * k * kZeta2 == doctest::Approx(dirichlet_sum(spec, 2.0, kDefaultTol).value).epsilon(1e-12));
  }
}

TEST_CASE("calibration parameters") {
  const double k = kappa(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(EnsembleSpec::uniform(), {8, 8});
  CHECK(p.delta[0] == doctest::Approx(k));
  CHECK(p.delta[1] == doctest::Approx(k));
  CHECK(p.alpha[0] == doctest::Approx(k / 2));
  CHECK(p.alpha[1] == doctest::Approx(k / 2));
  const GrandCanonicalParams q = calibrate(EnsembleSpec::logratio(1, 1), {8, 64});
  CHECK(q.alpha[0] * 8 == q.alpha[1] * 64);
  const GrandCanonicalParams big = calibrate(EnsembleSpec::uniform(), {1000000, 1000000});
  CHECK(big.z[0] == doctest::Approx(std::exp(-k / 100)).epsilon(1e-12));
  CHECK(big.z[0] == doctest::Approx(0.99103).epsilon(1e-5));
  CHECK_THROWS_AS(calibrate(EnsembleSpec::uniform(), {0, 5}), DomainError);
}

TEST_CASE("expected endpoint against a direct lattice double sum") {
  const Ensemble e(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(e.spec(), {50, 80});
  const auto brute = oracle::lattice_sum(p.alpha, 400, [](double d) {
    const double w = std::exp(-d);
    return w / (1 - w);
  });
  const Estimate2 mob = expected_endpoint(e, p, 1e-12);
  const Estimate2 lat = expected_endpoint_lattice(e, p, 1e-12);
  for (int j = 0; j < 2; ++j) {
    CHECK(mob.value[j] == doctest::Approx(brute[j]).epsilon(1e-10));
    CHECK(lat.value[j] == doctest::Approx(brute[j]).epsilon(1e-10));
  }
}

TEST_CASE("two summation routes agree at 500") {
  for (const EnsembleSpec& spec : builtin_defaults()) {
    const Ensemble e(spec);
    const GrandCanonicalParams p = calibrate(spec, {500, 500});
    const Estimate2 mob = expected_endpoint(e, p);
    const Estimate2 lat = expected_endpoint_lattice(e, p);
    for (int j = 0; j < 2; ++j) CHECK(mob.value[j] == doctest::Approx(lat.value[j]).epsilon(1e-6));
  }
}

TEST_CASE("endpoint is calibrated at 10^4 and monotone in alpha") {
  const Ensemble e(EnsembleSpec::uniform());
  GrandCanonicalParams p = calibrate(e.spec(), {10000, 10000});
  const Estimate2 E = expected_endpoint(e, p);
  CHECK(E.value[0] / 1e4 >= 0.95);
  CHECK(E.value[0] / 1e4 <= 1.05);
  GrandCanonicalParams q = p;
  for (int j = 0; j < 2; ++j) {
    q.alpha[j] *= 2;
    q.z[j] = std::exp(-q.alpha[j]);
  }
  CHECK(expected_endpoint(e, q).value[0] < E.value[0]);
}

TEST_CASE("expected profile") {
  const Ensemble e(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(e.spec(), {10000, 10000});
  const Point at0 = expected_profile(e, p, 0.0);
  CHECK(at0[0] == doctest::Approx(p.z[0] / (1 - p.z[0])).epsilon(1e-12));
  CHECK(at0[1] == 0.0);
  const Point inf = expected_profile(e, p, kInfinity);
  const Estimate2 E = expected_endpoint(e, p);
  CHECK(inf[0] == doctest::Approx(E.value[0]).epsilon(1e-8));
  const Point at1 = expected_profile(e, p, 1.0);
  CHECK(std::fabs(at1[0] / 1e4 - 0.75) <= 0.05);
  CHECK(std::fabs(at1[1] / 1e4 - 0.25) <= 0.05);
  const auto grid = expected_profile(e, p, std::vector<double>{0.0, 1.0, kInfinity});
  CHECK(grid[1][0] == doctest::Approx(at1[0]).epsilon(1e-10));
}

TEST_CASE("covariance and cumulants") {
  const Ensemble e(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(e.spec(), {40, 60});
  const Mat2 K = covariance(e, p, 1e-12);
  CHECK(K[0][1] == K[1][0]);
  long double k12 = 0, k11 = 0;
  for (int a = 0; a <= 400; ++a)
    for (int b = 0; b <= 400; ++b) {
      if (oracle::gcd(a, b) != 1) continue;
      const double w = std::exp(-(p.alpha[0] * a + p.alpha[1] * b));
      const double v = w / ((1 - w) * (1 - w));
      k12 += static_cast<long double>(a) * b * v;
      k11 += static_cast<long double>(a) * a * v;
    }
  CHECK(K[0][1] == doctest::Approx(static_cast<double>(k12)).epsilon(1e-9));
  CHECK(K[0][0] == doctest::Approx(static_cast<double>(k11)).epsilon(1e-9));
  const Estimate2 E = expected_endpoint_lattice(e, p, 1e-12);
  for (int j = 0; j < 2; ++j) {
    CHECK(cumulant_xi(e, p, 1, j + 1, 1e-12).value == doctest::Approx(E.value[j]).epsilon(1e-10));
    CHECK(cumulant_xi(e, p, 2, j + 1, 1e-12).value == doctest::Approx(K[j][j]).epsilon(1e-10));
    for (int q = 1; q <= 5; ++q) {
      CHECK(cumulant_xi_mobius(e, p, q, j + 1, 1e-12).value ==
            doctest::Approx(cumulant_xi(e, p, q, j + 1, 1e-12).value).epsilon(1e-8));
    }
  }
}

TEST_CASE("covariance asymptotics at 10^5") {
  const Ensemble e(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(e.spec(), {100000, 100000});
  const Mat2 K = covariance(e, p);
  const double n23 = std::pow(1e10, 2.0 / 3.0);
  CHECK(K[0][0] / n23 == doctest::Approx(2 / p.kappa).epsilon(0.10));
  const double det = K[0][0] * K[1][1] - K[0][1] * K[1][0];
  CHECK(det == doctest::Approx(3 / (p.kappa * p.kappa) * n23 * n23).epsilon(0.15));
}

TEST_CASE("moments from cumulants") {
  CHECK(moments_from_cumulants(std::vector<double>{2.5}) == std::vector<double>{2.5});
  CHECK(moments_from_cumulants(std::vector<double>{0, 1, 0}) == std::vector<double>{0, 1, 0});
  CHECK(moments_from_cumulants(std::vector<double>{1, 1, 1}) == std::vector<double>{1, 2, 5});
  // Poisson(1): all cumulants 1, moments are Bell numbers.
  CHECK(moments_from_cumulants(std::vector<double>{1, 1, 1, 1, 1}) == std::vector<double>{1, 2, 5, 15, 52});
}

TEST_CASE("moment report and density") {
  const Ensemble e(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(e.spec(), {500, 500});
  const MomentReport r = moment_report(e, p);
  CHECK(r.det_K > 0);
  CHECK(r.cumulants.size() == 4);
  const Mat2 VVK = multiply(multiply(r.V, r.V), r.K);
  CHECK(VVK[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(VVK[0][1] == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
  const double peak = lclt_density(r, r.a_z);
  CHECK(peak == doctest::Approx(1 / (2 * std::numbers::pi * std::sqrt(r.det_K))).epsilon(1e-12));
  CHECK(r.L_z > 0);
  CHECK(lyapunov(e, p) == doctest::Approx(r.L_z).epsilon(1e-12));
}

TEST_CASE("symmetric 2x2 helpers") {
  const Mat2 A{{{4, 1}, {1, 3}}};
  const auto ev = sym_eigenvalues(A);
  CHECK(ev[0] == doctest::Approx((7 - std::sqrt(5.0)) / 2));
  CHECK(ev[1] == doctest::Approx((7 + std::sqrt(5.0)) / 2));
  CHECK(spectral_norm(A) == doctest::Approx(ev[1]));
  const Mat2 V = inverse_sqrt(A);
  const Mat2 I = multiply(multiply(V, A), V);
  CHECK(I[0][0] == doctest::Approx(1.0));
  CHECK(I[0][1] == doctest::Approx(0.0).epsilon(1e-14).scale(1.0));
  CHECK_THROWS_AS(inverse_sqrt(Mat2{{{1, 2}, {2, 1}}}), DomainError);
}
