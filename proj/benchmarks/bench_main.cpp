#include <benchmark/benchmark.h>

#include "cvxlines/calibration.hpp"
#include "cvxlines/ensemble.hpp"
#include "cvxlines/geometry.hpp"
#include "cvxlines/oracle.hpp"
#include "cvxlines/sampler.hpp"
#include "cvxlines/series.hpp"

using namespace cvxlines;

namespace {

void BM_BFromA(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  const CoeffSeries a = a_coeffs(EnsembleSpec::multiset(1.5, 0.5), K);
  for (auto _ : state) benchmark::DoNotOptimize(b_from_a(a, K));
}
BENCHMARK(BM_BFromA)->Arg(64)->Arg(512)->Arg(4096);

void BM_Kappa(benchmark::State& state) {
  const EnsembleSpec spec = EnsembleSpec::logratio(2.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(kappa(spec));
}
BENCHMARK(BM_Kappa);

void BM_ExpectedEndpoint(benchmark::State& state) {
  const Ensemble e(EnsembleSpec::uniform());
  const std::int64_t n = state.range(0);
  const GrandCanonicalParams p = calibrate(e.spec(), {n, n});
  for (auto _ : state) benchmark::DoNotOptimize(expected_endpoint(e, p));
}
BENCHMARK(BM_ExpectedEndpoint)->Arg(1000)->Arg(100000);

void BM_ExpectedEndpointLattice(benchmark::State& state) {
  const Ensemble e(EnsembleSpec::uniform());
  const std::int64_t n = state.range(0);
  const GrandCanonicalParams p = calibrate(e.spec(), {n, n});
  for (auto _ : state) benchmark::DoNotOptimize(expected_endpoint_lattice(e, p));
}
BENCHMARK(BM_ExpectedEndpointLattice)->Arg(1000)->Arg(10000);

void BM_FieldSample(benchmark::State& state) {
  const Ensemble e(EnsembleSpec::uniform());
  const std::int64_t n = state.range(0);
  const GrandCanonicalParams p = calibrate(e.spec(), {n, n});
  const FieldSampler fs(e, p, 1e-6);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fs.sample(RngStream(1, i++)));
  state.counters["directions"] = static_cast<double>(fs.directions().size());
}
BENCHMARK(BM_FieldSample)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_TangentialDistance(benchmark::State& state) {
  const Ensemble e(EnsembleSpec::uniform());
  const std::int64_t n = state.range(0);
  const GrandCanonicalParams p = calibrate(e.spec(), {n, n});
  const PolygonalLine line = assemble(FieldSampler(e, p, 1e-6).sample(RngStream(2, 0)));
  for (auto _ : state) benchmark::DoNotOptimize(tangential_distance(line, {n, n}));
}
BENCHMARK(BM_TangentialDistance)->Arg(1000)->Arg(10000);

void BM_Hausdorff(benchmark::State& state) {
  const Ensemble e(EnsembleSpec::uniform());
  const Endpoint n{1000, 1000};
  const GrandCanonicalParams p = calibrate(e.spec(), n);
  const PolygonalLine line = assemble(FieldSampler(e, p, 1e-6).sample(RngStream(3, 0)));
  const auto arc = gamma_star_polyline(kGammaStarSegments);
  const auto path = scale(line, n).vertices;
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_distance(path, arc));
}
BENCHMARK(BM_Hausdorff)->Unit(benchmark::kMicrosecond);

void BM_CountCpn(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(count_cpn({n, n}));
}
BENCHMARK(BM_CountCpn)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
