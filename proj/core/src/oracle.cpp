#include "cvxlines/oracle.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "cvxlines/errors.hpp"
#include "cvxlines/parallel.hpp"

namespace cvxlines {

namespace {

void check_n(const Endpoint& n) {
  if (n[0] < 0 || n[1] < 0) throw DomainError("endpoint must be nonnegative");
  const double cells = static_cast<double>(n[0] + 1) * static_cast<double>(n[1] + 1);
  if (cells > 4e6) throw ResourceError("endpoint box too large for exact dynamic programming");
}

// new[m] = sum_{nu >= 0} c(nu) old[m - nu x], processed in place from the
// far corner so each direction is used once.
template <class Coef>
void dp_add_direction(std::vector<double>& table, const Endpoint& n, const Direction& d, Coef coef) {
  const std::int64_t stride = n[1] + 1;
  for (std::int64_t m1 = n[0]; m1 >= 0; --m1) {
    for (std::int64_t m2 = n[1]; m2 >= 0; --m2) {
      CompensatedSum acc;
      acc.add(table[static_cast<std::size_t>(m1 * stride + m2)]);
      for (std::int64_t nu = 1;; ++nu) {
        const std::int64_t r1 = m1 - nu * d.x1, r2 = m2 - nu * d.x2;
        if (r1 < 0 || r2 < 0) break;
        const double c = coef(nu);
        if (c != 0.0) acc.add(c * table[static_cast<std::size_t>(r1 * stride + r2)]);
      }
      table[static_cast<std::size_t>(m1 * stride + m2)] = acc.value();
    }
  }
}

}  // namespace

double count_cpn(Endpoint n) {
  check_n(n);
  std::vector<double> table(static_cast<std::size_t>((n[0] + 1) * (n[1] + 1)), 0.0);
  table[0] = 1.0;
  for (const Direction& d : directions_in_box(n[0], n[1])) {
    dp_add_direction(table, n, d, [](std::int64_t) { return 1.0; });
  }
  return table.back();
}

std::vector<PolygonalLine> enumerate_cpn(Endpoint n) {
  const double count = count_cpn(n);
  if (count > kMaxEnumeratedLines) {
    std::ostringstream msg;
    msg << "enumeration of " << count << " lines exceeds the guard of " << kMaxEnumeratedLines;
    throw ResourceError(msg.str());
  }
  const std::vector<Direction> dirs = directions_in_box(n[0], n[1]);
  const std::int64_t stride = n[1] + 1;
  const std::size_t cells = static_cast<std::size_t>((n[0] + 1) * stride);
  // reach[i][r]: remainder r can be formed from directions i, i+1, ...
  std::vector<std::vector<char>> reach(dirs.size() + 1, std::vector<char>(cells, 0));
  reach[dirs.size()][0] = 1;
  for (std::size_t i = dirs.size(); i-- > 0;) {
    const Direction& d = dirs[i];
    for (std::int64_t r1 = 0; r1 <= n[0]; ++r1) {
      for (std::int64_t r2 = 0; r2 <= n[1]; ++r2) {
        char ok = 0;
        for (std::int64_t nu = 0; !ok; ++nu) {
          const std::int64_t s1 = r1 - nu * d.x1, s2 = r2 - nu * d.x2;
          if (s1 < 0 || s2 < 0) break;
          ok = reach[i + 1][static_cast<std::size_t>(s1 * stride + s2)];
          if (d.x1 == 0 && d.x2 == 0) break;
        }
        reach[i][static_cast<std::size_t>(r1 * stride + r2)] = ok;
      }
    }
  }
  std::vector<PolygonalLine> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<Edge> stack;
  auto dfs = [&](auto&& self, std::size_t i, std::int64_t r1, std::int64_t r2) -> void {
    if (i == dirs.size()) {
      if (r1 == 0 && r2 == 0) out.emplace_back(stack);
      return;
    }
    const Direction& d = dirs[i];
    for (std::int64_t nu = 0;; ++nu) {
      const std::int64_t s1 = r1 - nu * d.x1, s2 = r2 - nu * d.x2;
      if (s1 < 0 || s2 < 0) break;
      if (!reach[i + 1][static_cast<std::size_t>(s1 * stride + s2)]) continue;
      if (nu > 0) stack.push_back({d, nu});
      self(self, i + 1, s1, s2);
      if (nu > 0) stack.pop_back();
    }
  };
  if (reach[0][cells - 1]) dfs(dfs, 0, n[0], n[1]);
  return out;
}

double weight(const PolygonalLine& line, const Ensemble& ensemble) {
  double w = 1.0;
  for (const Edge& e : line.edges()) {
    const double b = ensemble.b(static_cast<std::size_t>(e.mult));
    if (b == 0.0) return 0.0;
    w *= b;
  }
  return w;
}

std::vector<double> partition_table(Endpoint n, const Ensemble& ensemble) {
  check_n(n);
  std::vector<double> table(static_cast<std::size_t>((n[0] + 1) * (n[1] + 1)), 0.0);
  table[0] = 1.0;
  for (const Direction& d : directions_in_box(n[0], n[1])) {
    dp_add_direction(table, n, d,
                     [&](std::int64_t nu) { return ensemble.b(static_cast<std::size_t>(nu)); });
  }
  return table;
}

double partition_function(Endpoint n, const Ensemble& ensemble) {
  return partition_table(n, ensemble).back();
}

ExactDistribution exact_pn(Endpoint n, const Ensemble& ensemble) {
  ExactDistribution dist;
  dist.n = n;
  CompensatedSum total;
  for (PolygonalLine& line : enumerate_cpn(n)) {
    const double w = weight(line, ensemble);
    if (w <= 0.0) continue;
    dist.lines.push_back(std::move(line));
    dist.weights.push_back(w);
    total.add(w);
  }
  dist.total = total.value();
  if (!(dist.total > 0.0)) throw DomainError("partition function B_n vanishes");
  for (double w : dist.weights) dist.probabilities.push_back(w / dist.total);
  return dist;
}

Estimate log_beta_tilde(const Ensemble& ensemble, const GrandCanonicalParams& params,
                        double eps_tail) {
  const DirectionSet set = enumerate_directions(params.alpha, ensemble, eps_tail);
  const auto s = deterministic_sum<1>(set.size(), [&](std::size_t i) {
    const Direction& d = set.dirs[i];
    const Weight w = Weight::from_exponent(params.alpha[0] * static_cast<double>(d.x1) +
                                           params.alpha[1] * static_cast<double>(d.x2));
    return std::array<double, 1>{ensemble.log_beta(w)};
  });
  // ln beta <= beta - 1, so the set's tail bound also bounds the log tail.
  return {s[0], set.tail_mass_bound};
}

Estimate exact_q_endpoint(Endpoint n, const Ensemble& ensemble,
                          const GrandCanonicalParams& params, double eps_tail) {
  const double B = partition_function(n, ensemble);
  const Estimate lbt = log_beta_tilde(ensemble, params, eps_tail);
  if (B == 0.0) return {0.0, lbt.tail_bound};
  const double log_q = std::log(B) - params.alpha[0] * static_cast<double>(n[0]) -
                       params.alpha[1] * static_cast<double>(n[1]) - lbt.value;
  return {std::exp(log_q), lbt.tail_bound};
}

double exact_q_line(const PolygonalLine& line, const Ensemble& ensemble,
                    const GrandCanonicalParams& params, double eps_tail) {
  const double w = weight(line, ensemble);
  if (w == 0.0) return 0.0;
  const Estimate lbt = log_beta_tilde(ensemble, params, eps_tail);
  const Endpoint xi = line.endpoint();
  return std::exp(std::log(w) - params.alpha[0] * static_cast<double>(xi[0]) -
                  params.alpha[1] * static_cast<double>(xi[1]) - lbt.value);
}

double tv_distance(const std::map<std::string, std::uint64_t>& empirical,
                   const ExactDistribution& exact) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < exact.lines.size(); ++i) index[exact.lines[i].key()] = i;
  std::uint64_t N = 0;
  for (const auto& [key, c] : empirical) {
    if (!index.count(key)) throw DataError("sampled line '" + key + "' is outside the exact support");
    N += c;
  }
  if (N == 0) throw DataError("empirical distribution is empty");
  CompensatedSum acc;
  for (std::size_t i = 0; i < exact.lines.size(); ++i) {
    const auto it = empirical.find(exact.lines[i].key());
    const double phat = it == empirical.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(N);
    acc.add(std::fabs(phat - exact.probabilities[i]));
  }
  return 0.5 * acc.value();
}

}  // namespace cvxlines
