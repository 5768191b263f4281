#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cvxlines/errors.hpp"
#include "cvxlines/geometry.hpp"
#include "cvxlines/json_io.hpp"
#include "cvxlines/oracle.hpp"
#include "cvxlines/parallel.hpp"
#include "cvxlines/sampler.hpp"

namespace cvxlines::cli {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "v1";

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json t_value(double t) { return std::isinf(t) ? json("inf") : json(t); }

json summary_json(const Summary& s) {
  return json{{"count", s.count}, {"median", s.median}, {"p90", s.p90}, {"max", s.max}};
}

std::string render_json(const json& j) { return j.dump(2) + "\n"; }

Endpoint endpoint_or(const ExperimentConfig& c, Endpoint fallback) { return c.n.value_or(fallback); }

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  }
  return arr;
}

std::string checks_csv(const std::vector<Check>& checks) {
  std::ostringstream out;
  out << "name,measured,tolerance,pass\n";
  for (const auto& c : checks) {
    out << c.name << ',' << num(c.measured) << ',' << num(c.tolerance) << ',' << (c.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

// Runs fn(r) for every replicate in parallel; output order is by replicate.
template <class Row, class Fn>
std::vector<Row> run_replicates(std::uint64_t count, Fn fn) {
  std::vector<Row> rows(count);
  parallel_chunks(count, count, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) rows[r] = fn(static_cast<std::uint64_t>(r));
  });
  return rows;
}

double c1_for(const EnsembleSpec& spec) {
  if (spec.family == Family::kSelection) return 1.0 / ((1.0 + spec.rho) * (1.0 + spec.rho));
  return 1.0;
}

std::vector<EnsembleSpec> suite_ensembles(const ExperimentConfig& c) {
  std::vector<EnsembleSpec> specs = builtin_defaults();
  if (std::find(specs.begin(), specs.end(), c.ensemble) == specs.end()) specs.push_back(c.ensemble);
  return specs;
}

// ---- verify suites ----------------------------------------------------------

std::vector<Check> suite_series(const ExperimentConfig& c) {
  std::vector<Check> checks;
  const double tol = c.tol("series");
  for (const EnsembleSpec& spec : suite_ensembles(c)) {
    const std::string tag = describe(spec);
    const std::size_t L = spec.family == Family::kCustom
                              ? std::min<std::size_t>(50, spec.custom_a->coeffs.size())
                              : 50;
    const CoeffSeries a = a_coeffs(spec, L);
    const CoeffSeries back = a_from_b(b_from_a(a, L), L);
    double worst = 0.0;
    for (std::size_t k = 0; k < back.coeffs.size(); ++k) {
      const double scale = std::max(std::fabs(a.coeffs[k]), std::fabs(a.coeffs[0]) * 1e-12);
      worst = std::max(worst, std::fabs(back.coeffs[k] - a.coeffs[k]) / scale);
    }
    checks.push_back({"roundtrip " + tag, worst, tol, worst <= tol});
    const CoeffSeries b = b_from_a(a, 1);
    const double gap = std::fabs(a.coeffs[0] - b.coeffs[1]);
    checks.push_back({"a1_equals_b1 " + tag, gap, 0.0, gap == 0.0});
    if (spec.family != Family::kCustom) {
      const Ensemble e(spec, 256);
      double ratio = 0.0;
      for (int i = 1; i <= 9; ++i) {
        const double s = 0.1 * i;
        CompensatedSum partial;
        double p = 1.0;
        for (std::size_t l = 0; l <= 200; ++l) {
          partial.add(e.b(l) * p);
          p *= s;
        }
        const double err = std::fabs(beta_value(spec, s) - partial.value());
        const double bound = b_series_tail_bound(spec, s, 200) + 1e-13 * beta_value(spec, s);
        ratio = std::max(ratio, err / bound);
      }
      checks.push_back({"beta_consistency " + tag, ratio, 1.0, ratio <= 1.0});
    }
  }
  const auto exact = logratio_normalized_exact(4);
  const char* expect[] = {"1/2", "5/12", "3/8", "251/720"};
  double mismatches = 0;
  for (int i = 0; i < 4; ++i) {
    if (exact[i].numerator + "/" + exact[i].denominator != expect[i]) mismatches += 1;
  }
  checks.push_back({"logratio_exact_values", mismatches, 0.0, mismatches == 0});
  double violations = 0, min_b = 1.0;
  for (double r : {0.5, 1.0, 2.0, 3.5}) {
    for (double rho : {0.1, 0.5, 0.9, 1.0}) {
      const CoeffSeries a = logratio_a(r, rho, 50);
      for (std::size_t k = 1; k <= 50; ++k) {
        const double kk = static_cast<double>(k);
        const double base = r * std::pow(rho, kk);
        const double lo = base / (kk * kk * (kk + 1.0)), hi = base / (kk + 1.0);
        const double v = a.coeffs[k - 1];
        if (v < lo * (1 - 1e-14) || v > hi * (1 + 1e-14)) violations += 1;
      }
      const CoeffSeries b = b_from_a(logratio_a(r, rho, 200), 200);
      for (double v : b.coeffs) min_b = std::min(min_b, v);
    }
  }
  checks.push_back({"logratio_bracketing_violations", violations, 0.0, violations == 0});
  checks.push_back({"logratio_min_b", min_b, 0.0, min_b > 0.0});
  return checks;
}

std::vector<Check> suite_moments(const ExperimentConfig& c) {
  std::vector<Check> checks;
  const Endpoint n = endpoint_or(c, {500, 500});
  const double tail = c.tol("tail");
  const Ensemble e(c.ensemble);
  const GrandCanonicalParams p = calibrate(c.ensemble, n, tail);
  const Estimate2 mob = expected_endpoint(e, p, tail);
  const Estimate2 lat = expected_endpoint_lattice(e, p, tail);
  double route = 0.0, dev = 0.0;
  for (int j = 0; j < 2; ++j) {
    route = std::max(route, std::fabs(mob.value[j] - lat.value[j]) / std::fabs(lat.value[j]));
    dev = std::max(dev, std::fabs(mob.value[j] / static_cast<double>(n[j]) - 1.0));
  }
  checks.push_back({"two_route_relative_gap", route, 1e-6, route <= 1e-6});
  checks.push_back({"relative_deviation_from_n", dev, c.tol("deviation"), dev <= c.tol("deviation")});
  const MomentReport rep = moment_report(e, p, 4, tail);
  const double k1gap = std::max(std::fabs(rep.cumulants[0][0] - lat.value[0]) / lat.value[0],
                                std::fabs(rep.cumulants[0][1] - lat.value[1]) / lat.value[1]);
  checks.push_back({"kappa1_equals_mean", k1gap, 1e-10, k1gap <= 1e-10});
  const double k2gap = std::max(std::fabs(rep.cumulants[1][0] - rep.K[0][0]) / rep.K[0][0],
                                std::fabs(rep.cumulants[1][1] - rep.K[1][1]) / rep.K[1][1]);
  checks.push_back({"kappa2_equals_variance", k2gap, 1e-10, k2gap <= 1e-10});
  checks.push_back({"det_K_positive", rep.det_K, 0.0, rep.det_K > 0.0});
  const Mat2 VVK = multiply(multiply(rep.V, rep.V), rep.K);
  const double id_err = spectral_norm(Mat2{{{VVK[0][0] - 1.0, VVK[0][1]}, {VVK[1][0], VVK[1][1] - 1.0}}});
  checks.push_back({"V2K_identity", id_err, 1e-10, id_err <= 1e-10});
  double frob = 0.0;
  for (const auto& row : rep.K)
    for (double v : row) frob += v * v;
  const double nk = spectral_norm(rep.K);
  const bool frob_ok = frob / 2.0 <= nk * nk * (1 + 1e-12) && nk * nk <= frob * (1 + 1e-12);
  checks.push_back({"frobenius_norm_bounds", nk * nk / frob, 1.0, frob_ok});
  checks.push_back({"lyapunov_positive", rep.L_z, 0.0, rep.L_z > 0.0});
  return checks;
}

std::vector<Check> suite_lclt(const ExperimentConfig& c) {
  std::vector<Check> checks;
  const Endpoint n = endpoint_or(c, {100, 100});
  const std::uint64_t reps = c.replicates.value_or(1000000);
  const double factor = c.tol("lclt_factor");
  const Ensemble e(c.ensemble);
  const GrandCanonicalParams p = calibrate(c.ensemble, n, c.tol("tail"));
  const MomentReport rep = moment_report(e, p, 2, c.tol("tail"));
  const double dens = lclt_density(rep, {static_cast<double>(n[0]), static_cast<double>(n[1])});
  // Split the configurations over fixed per-block streams.
  const std::uint64_t blocks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(reps, 64));
  const auto hits = run_replicates<std::uint64_t>(blocks, [&](std::uint64_t b) {
    ConditionedSampler s(e, p);
    RngStream rng(c.seed, 1000 + b);
    const std::uint64_t lo = b * reps / blocks, hi = (b + 1) * reps / blocks;
    for (std::uint64_t i = lo; i < hi; ++i) s.attempt(rng);
    return s.hits();
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double emp = static_cast<double>(total) / static_cast<double>(reps);
  const double ratio = emp / dens;
  checks.push_back({"empirical_over_density", ratio, factor, ratio >= 1.0 / factor && ratio <= factor});
  if (n[0] <= 200 && n[1] <= 200) {
    const Estimate q = exact_q_endpoint(n, e, p, 1e-12);
    const double r2 = q.value / dens;
    checks.push_back({"exact_over_density", r2, factor, r2 >= 1.0 / factor && r2 <= factor});
  }
  return checks;
}

std::vector<Check> suite_oracle(const ExperimentConfig& c) {
  std::vector<Check> checks;
  const Endpoint n = endpoint_or(c, {5, 5});
  const std::uint64_t reps = c.replicates.value_or(100000);
  const double c11 = static_cast<double>(enumerate_cpn({1, 1}).size());
  const double c22 = static_cast<double>(enumerate_cpn({2, 2}).size());
  checks.push_back({"count_1_1", c11, 2.0, c11 == 2.0});
  checks.push_back({"count_2_2", c22, 5.0, c22 == 5.0});
  const double a = count_cpn(n), b = count_cpn({n[1], n[0]});
  checks.push_back({"count_transpose_invariant", a - b, 0.0, a == b});
  const Ensemble e(c.ensemble);
  const ExactDistribution exact = exact_pn(n, e);
  CompensatedSum psum;
  for (double q : exact.probabilities) psum.add(q);
  const double mass_err = std::fabs(psum.value() - 1.0);
  checks.push_back({"probabilities_sum_to_one", mass_err, 1e-12, mass_err <= 1e-12});
  const GrandCanonicalParams p = calibrate(c.ensemble, n, c.tol("tail"));
  GrandCanonicalParams p2 = calibrate_with_kappa(1.5 * p.kappa, n);
  const Estimate q1 = exact_q_endpoint(n, e, p, 1e-14), q2 = exact_q_endpoint(n, e, p2, 1e-14);
  double zfree = 0.0;
  for (std::size_t i = 0; i < exact.lines.size(); ++i) {
    const double c1 = exact_q_line(exact.lines[i], e, p, 1e-14) / q1.value;
    const double c2 = exact_q_line(exact.lines[i], e, p2, 1e-14) / q2.value;
    zfree = std::max({zfree, std::fabs(c1 - exact.probabilities[i]), std::fabs(c2 - exact.probabilities[i])});
  }
  checks.push_back({"z_freeness", zfree, 1e-12, zfree <= 1e-12});
  const std::uint64_t blocks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(reps, 64));
  const auto parts = run_replicates<std::map<std::string, std::uint64_t>>(blocks, [&](std::uint64_t blk) {
    ConditionedSampler s(e, p);
    RngStream rng(c.seed, 2000 + blk);
    std::map<std::string, std::uint64_t> counts;
    const std::uint64_t lo = blk * reps / blocks, hi = (blk + 1) * reps / blocks;
    for (std::uint64_t i = lo; i < hi; ++i) counts[s.sample(rng, c.budget).line.key()] += 1;
    return counts;
  });
  std::map<std::string, std::uint64_t> counts;
  for (const auto& part : parts)
    for (const auto& [k, v] : part) counts[k] += v;
  const double tv = tv_distance(counts, exact);
  checks.push_back({"tv_distance", tv, c.tol("tv"), tv <= c.tol("tv")});
  return checks;
}

std::vector<Check> suite_assumption71(const ExperimentConfig& c) {
  std::vector<Check> checks;
  for (const EnsembleSpec& spec : suite_ensembles(c)) {
    const auto res = check_assumption_71(spec, c1_for(spec), default_theta_grid(), default_t_grid());
    checks.push_back({"assumption71 " + describe(spec), res.min_margin, -kAssumption71Slack, res.holds});
  }
  return checks;
}

json base_json(const std::string& command, const ExperimentConfig& c) {
  return json{{"schema", kSchema}, {"command", command}, {"ensemble", c.ensemble}};
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tols{
      {"deviation", 0.05}, {"tail", 1e-9}, {"eps", 1e-6},   {"series", 1e-12},   {"dt", 0.10},
      {"tv", 0.02},        {"lclt_factor", 2.0}, {"mesh", 1e-3}, {"profile_se", 3.0}};
  return tols;
}

double ExperimentConfig::tol(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  const auto& d = default_tolerances();
  if (auto it = d.find(name); it != d.end()) return it->second;
  throw DomainError("unknown tolerance '" + name + "'");
}

void to_json(json& j, const ExperimentConfig& c) {
  json grid = json::array();
  for (double t : c.t_grid) grid.push_back(t_value(t));
  j = json{{"ensemble", c.ensemble},
           {"seed", c.seed},
           {"tolerances", c.tolerances},
           {"output", {{"path", c.out_path}, {"format", c.format}}},
           {"mode", c.mode},
           {"t_grid", grid},
           {"suite", c.suite},
           {"budget", c.budget},
           {"threads", c.threads}};
  j["n"] = c.n ? json(*c.n) : json(nullptr);
  j["replicates"] = c.replicates ? json(*c.replicates) : json(nullptr);
}

void from_json(const json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  if (j.contains("ensemble")) c.ensemble = j.at("ensemble").get<EnsembleSpec>();
  if (j.contains("n") && !j.at("n").is_null()) c.n = j.at("n").get<Endpoint>();
  if (j.contains("replicates") && !j.at("replicates").is_null()) c.replicates = j.at("replicates").get<std::uint64_t>();
  c.seed = j.value("seed", c.seed);
  if (j.contains("tolerances")) c.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
  if (j.contains("output")) {
    c.out_path = j.at("output").value("path", std::string());
    c.format = j.at("output").value("format", std::string("json"));
  }
  c.mode = j.value("mode", c.mode);
  if (j.contains("t_grid")) {
    for (const auto& t : j.at("t_grid")) {
      if (t.is_string()) {
        if (t.get<std::string>() != "inf") throw DomainError("t grid entries must be numbers or \"inf\"");
        c.t_grid.push_back(kInfinity);
      } else {
        c.t_grid.push_back(t.get<double>());
      }
    }
  }
  c.suite = j.value("suite", c.suite);
  c.budget = j.value("budget", c.budget);
  c.threads = j.value("threads", c.threads);
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t N = values.size();
  s.median = N % 2 ? values[N / 2] : 0.5 * (values[N / 2 - 1] + values[N / 2]);
  s.p90 = values[static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(N))) - 1];
  s.max = values.back();
  return s;
}

Endpoint parse_endpoint(const std::string& text) {
  Endpoint n{};
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> n[0] >> comma >> n[1]) || comma != ',' || !in.eof() || n[0] < 1 || n[1] < 1) {
    throw DomainError("expected n as two positive integers 'n1,n2', got '" + text + "'");
  }
  return n;
}

std::vector<double> parse_t_grid(const std::string& text) {
  std::vector<double> grid;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "inf" || item == "infinity") {
      grid.push_back(kInfinity);
      continue;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v >= 0.0)) throw DomainError("bad t grid entry '" + item + "'");
    grid.push_back(v);
  }
  return grid;
}

CommandOutput cmd_calibrate(const ExperimentConfig& c) {
  const Endpoint n = endpoint_or(c, {10000, 10000});
  const double tail = c.tol("tail");
  const Ensemble e(c.ensemble);
  const GrandCanonicalParams p = calibrate(c.ensemble, n, tail);
  const Estimate2 E = expected_endpoint(e, p, tail);
  std::array<double, 2> dev{}, rel{};
  for (int j = 0; j < 2; ++j) {
    dev[j] = E.value[j] - static_cast<double>(n[j]);
    rel[j] = dev[j] / static_cast<double>(n[j]);
  }
  const double rel_max = std::max(std::fabs(rel[0]), std::fabs(rel[1]));
  const bool pass = rel_max <= c.tol("deviation");
  CommandOutput out;
  out.exit_code = pass ? kPass : kCriterionFail;
  if (c.format == "csv") {
    std::ostringstream s;
    s << "n1,n2,kappa,delta1,delta2,alpha1,alpha2,z1,z2,E1,E2,dev1,dev2,rel_dev_max,pass\n";
    s << n[0] << ',' << n[1] << ',' << num(p.kappa) << ',' << num(p.delta[0]) << ',' << num(p.delta[1])
      << ',' << num(p.alpha[0]) << ',' << num(p.alpha[1]) << ',' << num(p.z[0]) << ',' << num(p.z[1])
      << ',' << num(E.value[0]) << ',' << num(E.value[1]) << ',' << num(dev[0]) << ',' << num(dev[1])
      << ',' << num(rel_max) << ',' << (pass ? 1 : 0) << '\n';
    out.text = s.str();
  } else {
    json j = base_json("calibrate", c);
    j["params"] = p;
    j["expected_endpoint"] = E.value;
    j["tail_bound"] = E.tail_bound;
    j["deviation"] = dev;
    j["relative_deviation"] = rel;
    j["tolerance"] = c.tol("deviation");
    j["pass"] = pass;
    out.text = render_json(j);
  }
  return out;
}

CommandOutput cmd_limit_shape(const ExperimentConfig& c) {
  const Endpoint n = endpoint_or(c, {10000, 10000});
  const std::uint64_t reps = c.replicates.value_or(200);
  if (c.mode != "qz" && c.mode != "pn") throw DomainError("mode must be qz or pn");
  struct Row {
    double d_T = 0, d_H = 0, sup1 = 0, sup2 = 0;
    Endpoint xi{0, 0};
    std::uint64_t attempts = 0;
    std::string status = "ok";
  };
  std::vector<Row> rows;
  if (reps > 0) {
    const Ensemble e(c.ensemble);
    const GrandCanonicalParams p = calibrate(c.ensemble, n, c.tol("tail"));
    const std::vector<Point> arc = gamma_star_polyline(kGammaStarSegments);
    std::optional<FieldSampler> field;
    if (c.mode == "qz") field.emplace(e, p, c.tol("eps"));
    rows = run_replicates<Row>(reps, [&](std::uint64_t r) {
      Row row;
      PolygonalLine line;
      if (field) {
        line = assemble(field->sample(RngStream(c.seed, r)));
        row.attempts = 1;
      } else {
        ConditionedSampler s(e, p);
        RngStream rng(c.seed, r);
        try {
          const ConditionedSample cs = s.sample(rng, c.budget);
          line = cs.line;
          row.attempts = cs.attempts;
        } catch (const BudgetExhausted& ex) {
          row.status = "budget_exhausted";
          row.attempts = ex.attempts();
          return row;
        }
      }
      const TangentialDistance td = tangential_report(line, n);
      row.d_T = td.d_T;
      row.sup1 = td.sup1;
      row.sup2 = td.sup2;
      row.d_H = hausdorff_distance(scale(line, n).vertices, arc);
      row.xi = line.endpoint();
      return row;
    });
  }
  std::vector<double> dts, dhs;
  bool dominated = true;
  for (const Row& r : rows) {
    if (r.status != "ok") continue;
    dts.push_back(r.d_T);
    dhs.push_back(r.d_H);
    if (r.d_H > r.d_T + c.tol("mesh")) dominated = false;
  }
  if (rows.empty()) return {"", kPass};
  const Summary sT = summarize(dts), sH = summarize(dhs);
  const bool complete = dts.size() == rows.size();
  const bool pass = complete && sT.median <= c.tol("dt") && dominated;
  CommandOutput out;
  out.exit_code = pass ? kPass : kCriterionFail;
  if (c.format == "csv") {
    std::ostringstream s;
    s << "replicate,d_T,d_H,sup1,sup2,xi1,xi2,attempts,status\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Row& x = rows[r];
      s << r << ',' << num(x.d_T) << ',' << num(x.d_H) << ',' << num(x.sup1) << ',' << num(x.sup2) << ','
        << x.xi[0] << ',' << x.xi[1] << ',' << x.attempts << ',' << x.status << '\n';
    }
    out.text = s.str();
  } else {
    json j = base_json("limit-shape", c);
    j["n"] = n;
    j["mode"] = c.mode;
    json arr = json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Row& x = rows[r];
      arr.push_back({{"replicate", r}, {"d_T", x.d_T}, {"d_H", x.d_H}, {"sup1", x.sup1}, {"sup2", x.sup2},
                     {"xi", x.xi}, {"attempts", x.attempts}, {"status", x.status}});
    }
    j["replicates"] = arr;
    j["summary"] = {{"d_T", summary_json(sT)}, {"d_H", summary_json(sH)}};
    j["tolerance"] = {{"dt", c.tol("dt")}, {"mesh", c.tol("mesh")}};
    j["pass"] = pass;
    out.text = render_json(j);
  }
  return out;
}

CommandOutput cmd_profile(const ExperimentConfig& c) {
  if (c.t_grid.empty()) throw DomainError("profile needs a nonempty t grid");
  const Endpoint n = endpoint_or(c, {10000, 10000});
  const std::uint64_t reps = c.replicates.value_or(100);
  const Ensemble e(c.ensemble);
  const GrandCanonicalParams p = calibrate(c.ensemble, n, c.tol("tail"));
  const std::vector<Point> analytic = expected_profile(e, p, c.t_grid, c.tol("tail"));
  const std::size_t G = c.t_grid.size();
  std::vector<std::vector<Point>> samples;
  if (reps > 0) {
    const FieldSampler field(e, p, c.tol("eps"));
    samples = run_replicates<std::vector<Point>>(reps, [&](std::uint64_t r) {
      const PolygonalLine line = assemble(field.sample(RngStream(c.seed, r)));
      std::vector<Point> v;
      for (double t : c.t_grid) v.push_back(xi_t(line, n, t));
      return v;
    });
  }
  const double n1 = static_cast<double>(n[0]), n2 = static_cast<double>(n[1]);
  struct Row {
    double t;
    Point E, g, mean, se;
  };
  std::vector<Row> rows;
  double worst = 0.0;
  bool pass = true;
  for (std::size_t i = 0; i < G; ++i) {
    Row row{c.t_grid[i], {analytic[i][0] / n1, analytic[i][1] / n2}, gamma_star(c.t_grid[i]), {}, {}};
    if (!samples.empty()) {
      for (int j = 0; j < 2; ++j) {
        CompensatedSum s, s2;
        for (const auto& v : samples) s.add(v[i][j]);
        const double R = static_cast<double>(samples.size());
        const double mean = s.value() / R;
        for (const auto& v : samples) s2.add((v[i][j] - mean) * (v[i][j] - mean));
        const double se = R > 1 ? std::sqrt(s2.value() / (R - 1.0) / R) : 0.0;
        row.mean[j] = mean;
        row.se[j] = se;
        const double gap = std::fabs(mean - row.E[j]);
        if (se > 0) worst = std::max(worst, gap / se);
        if (R > 1 && gap > c.tol("profile_se") * se + 1e-12) pass = false;
      }
    }
    rows.push_back(row);
  }
  CommandOutput out;
  out.exit_code = pass ? kPass : kCriterionFail;
  if (c.format == "csv") {
    std::ostringstream s;
    s << "t,E1_over_n1,E2_over_n2,g1,g2,mean1,mean2,se1,se2\n";
    for (const Row& r : rows) {
      s << num(r.t) << ',' << num(r.E[0]) << ',' << num(r.E[1]) << ',' << num(r.g[0]) << ',' << num(r.g[1])
        << ',' << num(r.mean[0]) << ',' << num(r.mean[1]) << ',' << num(r.se[0]) << ',' << num(r.se[1]) << '\n';
    }
    out.text = s.str();
  } else {
    json j = base_json("profile", c);
    j["n"] = n;
    j["replicates"] = reps;
    json arr = json::array();
    for (const Row& r : rows) {
      arr.push_back({{"t", t_value(r.t)}, {"expected_over_n", r.E}, {"g_star", r.g}, {"sample_mean", r.mean},
                     {"standard_error", r.se}});
    }
    j["rows"] = arr;
    j["max_gap_in_se"] = worst;
    j["tolerance"] = c.tol("profile_se");
    j["pass"] = pass;
    out.text = render_json(j);
  }
  return out;
}

CommandOutput cmd_verify(const ExperimentConfig& c) {
  std::vector<Check> checks;
  if (c.suite == "series") checks = suite_series(c);
  else if (c.suite == "moments") checks = suite_moments(c);
  else if (c.suite == "lclt") checks = suite_lclt(c);
  else if (c.suite == "oracle") checks = suite_oracle(c);
  else if (c.suite == "assumption71") checks = suite_assumption71(c);
  else throw DomainError("suite must be one of series, moments, lclt, oracle, assumption71");
  bool pass = true;
  for (const auto& ch : checks) pass = pass && ch.pass;
  CommandOutput out;
  out.exit_code = pass ? kPass : kCriterionFail;
  if (c.format == "csv") {
    out.text = checks_csv(checks);
  } else {
    json j = base_json("verify", c);
    j["suite"] = c.suite;
    j["checks"] = checks_json(checks);
    j["pass"] = pass;
    out.text = render_json(j);
  }
  return out;
}

CommandOutput cmd_sample(const ExperimentConfig& c) {
  const Endpoint n = endpoint_or(c, {c.mode == "pn" ? 20 : 1000, c.mode == "pn" ? 20 : 1000});
  const std::uint64_t reps = c.replicates.value_or(1);
  if (c.mode != "qz" && c.mode != "pn") throw DomainError("mode must be qz or pn");
  const Ensemble e(c.ensemble);
  const GrandCanonicalParams p = calibrate(c.ensemble, n, c.tol("tail"));
  struct Row {
    PolygonalLine line;
    std::uint64_t attempts = 0;
  };
  std::vector<Row> rows;
  if (c.mode == "qz") {
    const FieldSampler field(e, p, c.tol("eps"));
    rows = run_replicates<Row>(reps, [&](std::uint64_t r) {
      return Row{assemble(field.sample(RngStream(c.seed, r))), 1};
    });
  } else {
    rows = run_replicates<Row>(reps, [&](std::uint64_t r) {
      ConditionedSampler s(e, p);
      RngStream rng(c.seed, r);
      const ConditionedSample cs = s.sample(rng, c.budget);
      return Row{cs.line, cs.attempts};
    });
  }
  std::ostringstream s;
  if (c.format == "csv") {
    s << "replicate,vertex,x1,x2\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto v = rows[r].line.vertices();
      for (std::size_t i = 0; i < v.size(); ++i) s << r << ',' << i << ',' << v[i][0] << ',' << v[i][1] << '\n';
    }
  } else {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      json j{{"schema", kSchema}, {"replicate", r}, {"vertices", rows[r].line.vertices()}};
      if (c.mode == "pn") j["attempts"] = rows[r].attempts;
      s << j.dump() << '\n';
    }
  }
  return {s.str(), kPass};
}

CommandOutput cmd_enumerate(const ExperimentConfig& c) {
  const Endpoint n = endpoint_or(c, {5, 5});
  const Ensemble e(c.ensemble);
  const ExactDistribution d = exact_pn(n, e);
  std::ostringstream s;
  if (c.format == "csv") {
    s << "line,x1,x2,nu,weight,prob\n";
    for (std::size_t i = 0; i < d.lines.size(); ++i) {
      for (const Edge& ed : d.lines[i].edges()) {
        s << i << ',' << ed.dir.x1 << ',' << ed.dir.x2 << ',' << ed.mult << ',' << num(d.weights[i]) << ','
          << num(d.probabilities[i]) << '\n';
      }
    }
    return {s.str(), kPass};
  }
  json j = base_json("enumerate", c);
  j["distribution"] = d;
  j["count"] = d.lines.size();
  return {render_json(j), kPass};
}

CommandOutput run_command(const std::string& verb, const ExperimentConfig& config) {
  auto error = [&](int code, const std::string& kind, const std::string& msg) {
    json j{{"schema", kSchema}, {"command", verb}, {"error", {{"kind", kind}, {"message", msg}}}};
    return CommandOutput{render_json(j), code};
  };
  try {
    if (config.format != "json" && config.format != "csv") {
      throw DomainError("format must be json or csv");
    }
    config.ensemble.validate();
    if (config.threads > 0) set_thread_count(config.threads);
    if (verb == "calibrate") return cmd_calibrate(config);
    if (verb == "limit-shape") return cmd_limit_shape(config);
    if (verb == "profile") return cmd_profile(config);
    if (verb == "verify") return cmd_verify(config);
    if (verb == "sample") return cmd_sample(config);
    if (verb == "enumerate") return cmd_enumerate(config);
    return error(kUsageError, "usage", "unknown command '" + verb + "'");
  } catch (const DomainError& e) {
    return error(kUsageError, "domain", e.what());
  } catch (const BudgetExhausted& e) {
    return error(kResourceError, "budget", e.what());
  } catch (const PrecisionError& e) {
    return error(kResourceError, "precision", e.what());
  } catch (const ResourceError& e) {
    return error(kResourceError, "resource", e.what());
  } catch (const DataError& e) {
    return error(kCriterionFail, "data", e.what());
  }
}

}  // namespace cvxlines::cli
