#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "cvxlines/errors.hpp"
#include "cvxlines/oracle.hpp"
#include "cvxlines/sampler.hpp"

using namespace cvxlines;

TEST_CASE("pmf of nu") {
  const Ensemble u(EnsembleSpec::uniform());
  for (int l = 0; l < 30; ++l) CHECK(u.pmf(l, 0.5) == doctest::Approx(std::pow(0.5, l + 1)).epsilon(1e-13));
  const Ensemble s(EnsembleSpec::selection(1, 1));
  CHECK(s.pmf(1, 0.5) == doctest::Approx(1.0 / 3));
  CHECK(s.pmf(2, 0.5) == 0.0);
  CHECK(s.support_max() == 1);
  const Ensemble lr(EnsembleSpec::logratio(1, 1));
  double total = 0.0, mean = 0.0;
  for (int l = 0; l < 400; ++l) {
    total += lr.pmf(l, 0.6);
    mean += l * lr.pmf(l, 0.6);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mean == doctest::Approx(lr.cumulant(1, 0.6)).epsilon(1e-10));
  CHECK_THROWS_AS(u.pmf(1, 1.0), DomainError);
}

TEST_CASE("cumulants of nu against the pmf") {
  for (const EnsembleSpec& spec : builtin_defaults()) {
    const Ensemble e(spec);
    for (double w : {0.1, 0.5, 0.9}) {
      double m1 = 0, m2 = 0;
      for (int l = 0; l < 2000; ++l) {
        const double p = e.pmf(l, w);
        m1 += l * p;
        m2 += static_cast<double>(l) * l * p;
      }
      CHECK(e.cumulant(1, w) == doctest::Approx(m1).epsilon(1e-10));
      CHECK(e.cumulant(2, w) == doctest::Approx(m2 - m1 * m1).epsilon(1e-9));
    }
  }
}

TEST_CASE("sample_nu laws") {
  const Ensemble u(EnsembleSpec::uniform());
  RngStream rng(7, 0);
  for (int i = 0; i < 100; ++i) CHECK(sample_nu(u, 0.0, rng) == 0);
  double sum = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) sum += static_cast<double>(sample_nu(u, 0.5, rng));
  CHECK(std::fabs(sum / N - 1.0) <= 0.02);
  const Ensemble s(EnsembleSpec::selection(1, 1));
  int ones = 0;
  for (int i = 0; i < N; ++i) {
    const auto v = sample_nu(s, 0.5, rng);
    CHECK((v == 0 || v == 1));
    ones += static_cast<int>(v);
  }
  CHECK(std::fabs(ones / static_cast<double>(N) - 1.0 / 3) <= 0.01);
  CHECK_THROWS_AS(sample_nu(u, 1.0, rng), DomainError);
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(1, 2), b(1, 2), c(1, 3);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
  }
  CHECK(a.bits_at(0, 3, 4, 0) == b.bits_at(0, 3, 4, 0));
  CHECK(a.bits_at(0, 3, 4, 0) != a.bits_at(0, 4, 3, 0));
  CHECK(a.derive(1).uniform() != a.derive(2).uniform());
}

TEST_CASE("assemble") {
  CHECK(assemble(Configuration{}).vertices() == std::vector<Endpoint>{{0, 0}});
  Configuration c{{Edge{{1, 0}, 2}, Edge{{1, 2}, 1}}, {3, 2}};
  CHECK(c.consistent());
  CHECK(assemble(c).vertices() == std::vector<Endpoint>{{0, 0}, {2, 0}, {3, 2}});
  Configuration bad{{Edge{{1, 0}, 2}}, {3, 0}};
  CHECK_FALSE(bad.consistent());
}

TEST_CASE("field sampler") {
  const Ensemble e(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(e.spec(), {10000, 10000});
  const FieldSampler fs(e, p, 1e-6);
  const Estimate2 E = expected_endpoint(e, p);
  const int R = 500;
  double s = 0, s2 = 0;
  for (int r = 0; r < R; ++r) {
    const Configuration c = fs.sample(RngStream(11, r));
    CHECK(c.consistent());
    const PolygonalLine line = assemble(c);
    for (std::size_t i = 1; i < line.edges().size(); ++i) {
      CHECK(slope_less(line.edges()[i - 1].dir, line.edges()[i].dir));
    }
    s += static_cast<double>(c.endpoint[0]);
    s2 += static_cast<double>(c.endpoint[0]) * static_cast<double>(c.endpoint[0]);
  }
  const double mean = s / R, se = std::sqrt((s2 / R - mean * mean) / (R - 1));
  CHECK(std::fabs(mean - E.value[0]) <= 3 * se);
  CHECK(sample_configuration(e, p, 1e-6, RngStream(11, 3)).endpoint == fs.sample(RngStream(11, 3)).endpoint);
}

TEST_CASE("per-direction keys make truncation changes local") {
  const Ensemble e(EnsembleSpec::uniform());
  const GrandCanonicalParams p = calibrate(e.spec(), {2000, 2000});
  const FieldSampler tight(e, p, 1e-10), loose(e, p, 1e-6);
  for (int r = 0; r < 20; ++r) {
    const Configuration a = tight.sample(RngStream(5, r)), b = loose.sample(RngStream(5, r));
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> ma, mb;
    for (const Edge& x : a.entries) ma[{x.dir.x1, x.dir.x2}] = x.mult;
    for (const Edge& x : b.entries) mb[{x.dir.x1, x.dir.x2}] = x.mult;
    for (const Direction& d : loose.directions().dirs) {
      const auto k = std::make_pair(d.x1, d.x2);
      CHECK(ma.count(k) == mb.count(k));
      if (ma.count(k)) CHECK(ma[k] == mb[k]);
    }
  }
}

TEST_CASE("conditioned sampler") {
  const Ensemble e(EnsembleSpec::uniform());
  RngStream rng(3, 0);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    const ConditionedSample s = sample_conditioned(e, {1, 1}, 1000000, rng);
    CHECK(s.line.endpoint() == Endpoint{1, 1});
    seen.insert(s.line.key());
  }
  CHECK(seen == std::set<std::string>{"1,0,1;0,1,1", "1,1,1"});

  const GrandCanonicalParams p = calibrate(e.spec(), {6, 6});
  ConditionedSampler cs(e, p);
  RngStream r2(4, 0);
  for (int i = 0; i < 200000; ++i) cs.attempt(r2);
  const double exact = exact_q_endpoint({6, 6}, e, p, 1e-14).value;
  CHECK(cs.hit_rate() >= exact / 3);
  CHECK(cs.hit_rate() <= exact * 3);
  CHECK(cs.outside_hazard() > 0);

  const GrandCanonicalParams big = calibrate(e.spec(), {300, 300});
  ConditionedSampler hard(e, big);
  RngStream r3(5, 0);
  try {
    (void)hard.sample(r3, 3);
    FAIL("expected budget exhaustion");
  } catch (const BudgetExhausted& ex) {
    CHECK(ex.attempts() == 3);
    CHECK(ex.hit_rate() == 0.0);
  }
}
