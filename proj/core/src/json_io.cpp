#include "cvxlines/json_io.hpp"

#include "cvxlines/errors.hpp"

namespace cvxlines {

using nlohmann::json;

void to_json(json& j, const TailEnvelope& env) {
  j = json{{"scale", env.scale}, {"ratio", env.ratio}, {"power", env.power}};
}

void from_json(const json& j, TailEnvelope& env) {
  env.scale = j.at("scale").get<double>();
  env.ratio = j.at("ratio").get<double>();
  env.power = j.value("power", 0.0);
  env.exact = false;
  env.alternating = false;
  if (!(env.scale >= 0.0 && env.ratio >= 0.0)) throw DomainError("envelope must be nonnegative");
}

void to_json(json& j, const EnsembleSpec& spec) {
  j = json{{"family", std::string(to_string(spec.family))}, {"r", spec.r}, {"rho", spec.rho}};
  if (spec.custom_a) {
    j["custom_a"] = spec.custom_a->coeffs;
    if (spec.custom_a->envelope) j["custom_envelope"] = *spec.custom_a->envelope;
  }
}

void from_json(const json& j, EnsembleSpec& spec) {
  if (!j.is_object()) throw DomainError("ensemble must be a JSON object");
  spec = EnsembleSpec{};
  spec.family = family_from_string(j.at("family").get<std::string>());
  spec.r = j.value("r", 1.0);
  spec.rho = j.value("rho", 1.0);
  if (j.contains("custom_a")) {
    CoeffSeries a;
    a.kind = SeriesKind::kA;
    a.coeffs = j.at("custom_a").get<std::vector<double>>();
    if (j.contains("custom_envelope")) a.envelope = j.at("custom_envelope").get<TailEnvelope>();
    spec.custom_a = std::move(a);
  }
}

void to_json(json& j, const GrandCanonicalParams& p) {
  j = json{{"n", p.n}, {"kappa", p.kappa}, {"delta", p.delta}, {"alpha", p.alpha}, {"z", p.z}};
}

void from_json(const json& j, GrandCanonicalParams& p) {
  p.n = j.at("n").get<Endpoint>();
  p.kappa = j.at("kappa").get<double>();
  p.delta = j.at("delta").get<std::array<double, 2>>();
  p.alpha = j.at("alpha").get<std::array<double, 2>>();
  p.z = j.at("z").get<std::array<double, 2>>();
}

void to_json(json& j, const MomentReport& r) {
  j = json{{"a_z", r.a_z}, {"K_z", r.K}, {"det_Kz", r.det_K}, {"V_z", r.V},
           {"cumulants", r.cumulants}, {"L_z", r.L_z}};
}

void to_json(json& j, const PolygonalLine& line) {
  j = json{{"vertices", line.vertices()}};
}

void to_json(json& j, const Configuration& c) {
  json entries = json::array();
  for (const Edge& e : c.entries) entries.push_back({e.dir.x1, e.dir.x2, e.mult});
  j = json{{"entries", entries}, {"endpoint", c.endpoint}};
}

void to_json(json& j, const ExactDistribution& d) {
  json lines = json::array();
  for (std::size_t i = 0; i < d.lines.size(); ++i) {
    json edges = json::array();
    for (const Edge& e : d.lines[i].edges()) edges.push_back({e.dir.x1, e.dir.x2, e.mult});
    lines.push_back({{"edges", edges}, {"weight", d.weights[i]}, {"prob", d.probabilities[i]}});
  }
  j = json{{"n", d.n}, {"B_n", d.total}, {"lines", lines}};
}

EnsembleSpec parse_ensemble(const std::string& text) {
  try {
    EnsembleSpec spec = json::parse(text).get<EnsembleSpec>();
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed ensemble JSON: ") + e.what());
  }
}

}  // namespace cvxlines
