#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "cvxlines/errors.hpp"
#include "cvxlines/json_io.hpp"

namespace {

using cvxlines::cli::ExperimentConfig;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cvxlines::DomainError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Accepts inline JSON, a built-in family name, or a path to a JSON file.
cvxlines::EnsembleSpec load_ensemble(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return cvxlines::parse_ensemble(arg);
  if (arg == "uniform" || arg == "multiset") return cvxlines::EnsembleSpec::uniform();
  if (arg == "selection") return cvxlines::EnsembleSpec::selection(1.0, 1.0);
  if (arg == "assembly") return cvxlines::EnsembleSpec::assembly(1.0, 0.0);
  if (arg == "logratio") return cvxlines::EnsembleSpec::logratio(1.0, 1.0);
  return cvxlines::parse_ensemble(read_file(arg));
}

struct RawFlags {
  std::string config_path, ensemble, n, t_grid, format, out, mode, suite;
  std::optional<std::uint64_t> replicates, seed, budget;
  std::optional<unsigned> threads;
  std::map<std::string, double> tols;
};

void add_flags(CLI::App* cmd, RawFlags& f) {
  cmd->add_option("--config", f.config_path, "ExperimentConfig JSON file; flags override it");
  cmd->add_option("--ensemble", f.ensemble, "ensemble as JSON, JSON file, or family name");
  cmd->add_option("--n", f.n, "endpoint n1,n2");
  cmd->add_option("--seed", f.seed, "64-bit seed");
  cmd->add_option("--replicates", f.replicates, "number of replicates or samples");
  cmd->add_option("--format", f.format, "csv or json");
  cmd->add_option("--out", f.out, "output path (default stdout)");
  cmd->add_option("--threads", f.threads, "worker threads (default: all cores)");
  cmd->add_option("--mode", f.mode, "qz or pn");
  cmd->add_option("--t-grid", f.t_grid, "comma separated t values, inf allowed");
  cmd->add_option("--suite", f.suite, "series, moments, lclt, oracle or assumption71");
  cmd->add_option("--budget", f.budget, "rejection attempts per conditioned sample");
  for (const auto& [name, value] : cvxlines::cli::default_tolerances()) {
    std::string flag = "--tol-" + name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    std::ostringstream help;
    help << "tolerance (default " << value << ")";
    cmd->add_option_function<double>(
        flag, [&f, key = name](double v) { f.tols[key] = v; }, help.str());
  }
}

ExperimentConfig build_config(const RawFlags& f) {
  ExperimentConfig c;
  if (!f.config_path.empty()) c = nlohmann::json::parse(read_file(f.config_path)).get<ExperimentConfig>();
  if (!f.ensemble.empty()) c.ensemble = load_ensemble(f.ensemble);
  if (!f.n.empty()) c.n = cvxlines::cli::parse_endpoint(f.n);
  if (f.seed) c.seed = *f.seed;
  if (f.replicates) c.replicates = *f.replicates;
  if (!f.format.empty()) c.format = f.format;
  if (!f.out.empty()) c.out_path = f.out;
  if (f.threads) c.threads = *f.threads;
  if (!f.mode.empty()) c.mode = f.mode;
  if (!f.t_grid.empty()) c.t_grid = cvxlines::cli::parse_t_grid(f.t_grid);
  if (!f.suite.empty()) c.suite = f.suite;
  if (f.budget) c.budget = *f.budget;
  for (const auto& [k, v] : f.tols) c.tolerances[k] = v;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random convex lattice polygonal lines: sampling, enumeration and limit shape checks"};
  app.require_subcommand(1);
  RawFlags flags;
  const char* verbs[][2] = {
      {"calibrate", "calibrate z for an endpoint and report E_z xi"},
      {"limit-shape", "per-replicate distances to the limit arc"},
      {"profile", "expected and sampled tangential profile on a t grid"},
      {"verify", "run one verification suite"},
      {"sample", "draw lines (JSON lines or CSV vertices)"},
      {"enumerate", "exact P_n over all lines ending at n"},
  };
  for (const auto& v : verbs) add_flags(app.add_subcommand(v[0], v[1]), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cvxlines::cli::kUsageError;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  cvxlines::cli::CommandOutput result;
  ExperimentConfig config;
  try {
    config = build_config(flags);
    if (verb == "profile" && !flags.t_grid.empty() && config.t_grid.empty()) {
      throw cvxlines::DomainError("profile needs a nonempty t grid");
    }
    result = cvxlines::cli::run_command(verb, config);
  } catch (const std::exception& e) {
    const nlohmann::json j{{"schema", "v1"}, {"command", verb}, {"error", {{"kind", "usage"}, {"message", e.what()}}}};
    std::cerr << j.dump(2) << '\n';
    return cvxlines::cli::kUsageError;
  }

  if (result.exit_code >= cvxlines::cli::kUsageError) {
    std::cerr << result.text;
    return result.exit_code;
  }
  if (config.out_path.empty()) {
    std::cout << result.text;
  } else {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write '" << config.out_path << "'\n";
      return cvxlines::cli::kResourceError;
    }
    out << result.text;
  }
  return result.exit_code;
}
