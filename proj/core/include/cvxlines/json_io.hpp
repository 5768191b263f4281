#pragma once

// JSON forms of the public data types.
//
//   EnsembleSpec: {"family": "multiset", "r": 1, "rho": 1,
//                  "custom_a": [..], "custom_envelope": {"scale", "ratio", "power"}}

#include <string>

#include <nlohmann/json.hpp>

#include "cvxlines/calibration.hpp"
#include "cvxlines/geometry.hpp"
#include "cvxlines/oracle.hpp"
#include "cvxlines/sampler.hpp"
#include "cvxlines/series.hpp"

namespace cvxlines {

void to_json(nlohmann::json& j, const TailEnvelope& env);
void from_json(const nlohmann::json& j, TailEnvelope& env);
void to_json(nlohmann::json& j, const EnsembleSpec& spec);
void from_json(const nlohmann::json& j, EnsembleSpec& spec);
void to_json(nlohmann::json& j, const GrandCanonicalParams& p);
void from_json(const nlohmann::json& j, GrandCanonicalParams& p);
void to_json(nlohmann::json& j, const MomentReport& r);
void to_json(nlohmann::json& j, const PolygonalLine& line);
void to_json(nlohmann::json& j, const Configuration& c);
void to_json(nlohmann::json& j, const ExactDistribution& d);

// Parses an ensemble from JSON text; DomainError on malformed input.
EnsembleSpec parse_ensemble(const std::string& text);

}  // namespace cvxlines
