#pragma once

// Experiment commands behind the cvxlines executable. Each command is a
// pure function of its configuration and returns the rendered output plus
// an exit code, so tests can run them in-process.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvxlines/calibration.hpp"
#include "cvxlines/series.hpp"

namespace cvxlines::cli {

enum ExitCode : int { kPass = 0, kCriterionFail = 1, kUsageError = 2, kResourceError = 3 };

struct ExperimentConfig {
  EnsembleSpec ensemble = EnsembleSpec::uniform();
  std::optional<Endpoint> n;
  std::optional<std::uint64_t> replicates;
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;  // overrides of default_tolerances()
  std::string out_path;                      // empty: standard output
  std::string format = "json";               // json | csv
  std::string mode = "qz";                   // qz | pn
  std::vector<double> t_grid;
  std::string suite;
  std::uint64_t budget = 10000000;
  unsigned threads = 0;  // 0: machine default

  double tol(const std::string& name) const;
};

// deviation, tail, eps, series, dt, tv, lclt_factor, mesh, profile_se
const std::map<std::string, double>& default_tolerances();

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

struct CommandOutput {
  std::string text;
  int exit_code = kPass;
};

CommandOutput cmd_calibrate(const ExperimentConfig& config);
CommandOutput cmd_limit_shape(const ExperimentConfig& config);
CommandOutput cmd_profile(const ExperimentConfig& config);
CommandOutput cmd_verify(const ExperimentConfig& config);
CommandOutput cmd_sample(const ExperimentConfig& config);
CommandOutput cmd_enumerate(const ExperimentConfig& config);

// Runs a command by verb name, mapping library errors to exit codes with a
// structured error object as output.
CommandOutput run_command(const std::string& verb, const ExperimentConfig& config);

struct Summary {
  std::size_t count = 0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};
Summary summarize(std::vector<double> values);

// Parses "a,b" into an endpoint and "0,1,inf" into a t grid.
Endpoint parse_endpoint(const std::string& text);
std::vector<double> parse_t_grid(const std::string& text);

}  // namespace cvxlines::cli
