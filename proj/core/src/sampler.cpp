#include "cvxlines/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "cvxlines/errors.hpp"
#include "cvxlines/parallel.hpp"

namespace cvxlines {

namespace {

std::atomic<std::uint64_t> g_resamples{0};

Weight weight_of(const Direction& d, const std::array<double, 2>& alpha) {
  return Weight::from_exponent(alpha[0] * static_cast<double>(d.x1) +
                               alpha[1] * static_cast<double>(d.x2));
}

}  // namespace

bool Configuration::consistent() const {
  std::int64_t s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].mult < 1) return false;
    if (i > 0 && !slope_less(entries[i - 1].dir, entries[i].dir)) return false;
    s1 += entries[i].dir.x1 * entries[i].mult;
    s2 += entries[i].dir.x2 * entries[i].mult;
  }
  return s1 == endpoint[0] && s2 == endpoint[1];
}

std::uint64_t quantile_resamples() noexcept { return g_resamples.load(); }

std::int64_t sample_nu(const Ensemble& ensemble, double w, RngStream& rng) {
  const Weight x = Weight::of(w);
  for (;;) {
    const std::int64_t v = ensemble.quantile(rng.uniform(), x);
    if (v >= 0) return v;
    g_resamples.fetch_add(1);
  }
}

FieldSampler::FieldSampler(const Ensemble& ensemble, const GrandCanonicalParams& params,
                           double eps_tail)
    : ensemble_(ensemble),
      params_(params),
      set_(enumerate_directions(params.alpha, ensemble, eps_tail)) {
  weights_.reserve(set_.size());
  p0_.reserve(set_.size());
  for (const Direction& d : set_.dirs) {
    const Weight w = weight_of(d, params.alpha);
    weights_.push_back(w);
    p0_.push_back(std::exp(-ensemble.log_beta(w)));
  }
}

Configuration FieldSampler::sample(const RngStream& rng, std::uint64_t attempt) const {
  Configuration c;
  for (std::size_t i = 0; i < set_.size(); ++i) {
    const Direction& d = set_.dirs[i];
    double u = rng.uniform_at(attempt, d.x1, d.x2, 0);
    if (u < p0_[i]) continue;
    std::int64_t nu = ensemble_.quantile(u, weights_[i]);
    for (std::uint64_t k = 1; nu < 0; ++k) {
      g_resamples.fetch_add(1);
      u = rng.uniform_at(attempt, d.x1, d.x2, k);
      nu = ensemble_.quantile(u, weights_[i]);
    }
    if (nu == 0) continue;
    c.entries.push_back({d, nu});
    c.endpoint[0] += d.x1 * nu;
    c.endpoint[1] += d.x2 * nu;
  }
  return c;
}

Configuration sample_configuration(const Ensemble& ensemble, const GrandCanonicalParams& params,
                                   double eps_tail, const RngStream& rng, std::uint64_t attempt) {
  return FieldSampler(ensemble, params, eps_tail).sample(rng, attempt);
}

PolygonalLine assemble(const Configuration& config) {
  std::vector<Edge> edges = config.entries;
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return slope_less(a.dir, b.dir); });
  return PolygonalLine(std::move(edges));
}

ConditionedSampler::ConditionedSampler(const Ensemble& ensemble,
                                       const GrandCanonicalParams& params, double eps_tail)
    : ensemble_(ensemble), params_(params), dirs_(directions_in_box(params.n[0], params.n[1])) {
  if (!(ensemble.a1() > 0.0)) throw DomainError("conditioning needs b_1 > 0");
  weights_.reserve(dirs_.size());
  cum_hazard_.reserve(dirs_.size());
  CompensatedSum cum;
  for (const Direction& d : dirs_) {
    const Weight w = weight_of(d, params.alpha);
    weights_.push_back(w);
    cum.add(ensemble.log_beta(w));
    cum_hazard_.push_back(cum.value());
  }
  const DirectionSet all = enumerate_directions(params.alpha, ensemble, eps_tail);
  CompensatedSum out;
  for (const Direction& d : all.dirs) {
    if (d.x1 > params.n[0] || d.x2 > params.n[1]) out.add(ensemble.log_beta(weight_of(d, params.alpha)));
  }
  outside_hazard_ = out.value();
}

bool ConditionedSampler::attempt(RngStream& rng, std::vector<Edge>* edges) {
  ++attempts_;
  if (edges) edges->clear();
  // Unit-rate Poisson points on [0, H_out + H_box): a point in a direction's
  // hazard segment marks it occupied, with probability 1 - 1/beta(z^x).
  double pos = rng.exponential();
  if (pos < outside_hazard_) return false;
  pos -= outside_hazard_;
  const double total = cum_hazard_.empty() ? 0.0 : cum_hazard_.back();
  std::int64_t s1 = 0, s2 = 0;
  const std::int64_t n1 = params_.n[0], n2 = params_.n[1];
  while (pos < total) {
    const auto it = std::upper_bound(cum_hazard_.begin(), cum_hazard_.end(), pos);
    if (it == cum_hazard_.end()) break;
    const auto i = static_cast<std::size_t>(it - cum_hazard_.begin());
    std::int64_t nu = -1;
    while (nu < 0) {
      nu = ensemble_.quantile_positive(rng.uniform(), weights_[i]);
      if (nu < 0) g_resamples.fetch_add(1);
    }
    s1 += dirs_[i].x1 * nu;
    s2 += dirs_[i].x2 * nu;
    if (s1 > n1 || s2 > n2) return false;
    if (edges) edges->push_back({dirs_[i], nu});
    pos = cum_hazard_[i] + rng.exponential();
  }
  if (s1 != n1 || s2 != n2) return false;
  ++hits_;
  return true;
}

ConditionedSample ConditionedSampler::sample(RngStream& rng, std::uint64_t budget) {
  if (budget == 0) throw DomainError("budget must be positive");
  std::vector<Edge> edges;
  const std::uint64_t start = attempts_;
  const std::uint64_t start_hits = hits_;
  for (std::uint64_t k = 1; k <= budget; ++k) {
    if (attempt(rng, &edges)) return {PolygonalLine(edges), k};
  }
  const std::uint64_t used = attempts_ - start;
  throw BudgetExhausted(used, static_cast<double>(hits_ - start_hits) / static_cast<double>(used));
}

ConditionedSample sample_conditioned(const Ensemble& ensemble, Endpoint n, std::uint64_t budget,
                                     RngStream& rng) {
  const GrandCanonicalParams params = calibrate(ensemble.spec(), n);
  ConditionedSampler sampler(ensemble, params);
  return sampler.sample(rng, budget);
}

}  // namespace cvxlines
