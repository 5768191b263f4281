#include <doctest.h>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "cvxlines/errors.hpp"
#include "cvxlines/json_io.hpp"
#include "cvxlines/parallel.hpp"

using namespace cvxlines;
using namespace cvxlines::cli;
using nlohmann::json;

TEST_CASE("ensemble JSON round trip") {
  for (const EnsembleSpec& spec : builtin_defaults()) {
    const EnsembleSpec back = json(spec).get<EnsembleSpec>();
    CHECK(back == spec);
  }
  CHECK_THROWS_AS(parse_ensemble(R"({"family":"multiset","r":1,"rho":1.5})"), DomainError);
  CHECK_THROWS_AS(parse_ensemble("not json"), DomainError);
  const EnsembleSpec custom = parse_ensemble(
      R"({"family":"custom","custom_a":[1,0.5],"custom_envelope":{"scale":1,"ratio":0.5,"power":1}})");
  CHECK(custom.family == Family::kCustom);
  CHECK(json(custom).get<EnsembleSpec>() == custom);
}

TEST_CASE("experiment config round trip") {
  ExperimentConfig c;
  c.ensemble = EnsembleSpec::logratio(2, 0.5);
  c.n = Endpoint{30, 40};
  c.replicates = 17;
  c.seed = 0xfeedface12345ULL;
  c.tolerances = {{"dt", 0.2}};
  c.format = "csv";
  c.out_path = "x.csv";
  c.t_grid = {0, 1.5, kInfinity};
  c.suite = "oracle";
  const ExperimentConfig back = json::parse(json(c).dump()).get<ExperimentConfig>();
  CHECK(json(back) == json(c));
  CHECK(back.tol("dt") == 0.2);
  CHECK(back.tol("tv") == 0.02);
  CHECK_THROWS_AS(back.tol("nonexistent"), DomainError);
  for (const auto& [name, v] : default_tolerances()) CHECK(v > 0);
}

TEST_CASE("summaries") {
  const Summary s = summarize({5, 1, 4, 2, 3, 6, 7, 8, 9, 10});
  CHECK(s.count == 10);
  CHECK(s.median == 5.5);
  CHECK(s.p90 == 9);
  CHECK(s.max == 10);
  CHECK(summarize({}).count == 0);
}

TEST_CASE("argument parsing") {
  CHECK(parse_endpoint("12,34") == Endpoint{12, 34});
  CHECK_THROWS_AS(parse_endpoint("12"), DomainError);
  CHECK_THROWS_AS(parse_endpoint("0,3"), DomainError);
  CHECK(parse_t_grid("0,1,inf") == std::vector<double>{0, 1, kInfinity});
  CHECK(parse_t_grid("").empty());
  CHECK_THROWS_AS(parse_t_grid("a"), DomainError);
  CHECK_THROWS_AS(parse_t_grid("-1"), DomainError);
}

TEST_CASE("calibrate command") {
  ExperimentConfig c;
  const CommandOutput out = run_command("calibrate", c);
  CHECK(out.exit_code == kPass);
  const json j = json::parse(out.text);
  CHECK(j["schema"] == "v1");
  CHECK(j["pass"] == true);
  c.n = Endpoint{8, 8};
  const json k = json::parse(run_command("calibrate", c).text);
  CHECK(k["params"]["alpha"][0].get<double>() == doctest::Approx(k["params"]["kappa"].get<double>() / 2));
  c.ensemble.rho = 1.5;
  const CommandOutput bad = run_command("calibrate", c);
  CHECK(bad.exit_code == kUsageError);
  CHECK(bad.text.find("parameter out of range") != std::string::npos);
  c = ExperimentConfig{};
  c.format = "csv";
  CHECK(run_command("calibrate", c).text.rfind("n1,n2,kappa,", 0) == 0);
  c.format = "xml";
  CHECK(run_command("calibrate", c).exit_code == kUsageError);
}

TEST_CASE("limit-shape command") {
  ExperimentConfig c;
  c.replicates = 0;
  const CommandOutput empty = run_command("limit-shape", c);
  CHECK(empty.exit_code == kPass);
  CHECK(empty.text.empty());
  c.replicates = 4;
  c.n = Endpoint{300, 300};
  c.tolerances["dt"] = 1.0;
  const CommandOutput a = run_command("limit-shape", c);
  CHECK(a.exit_code == kPass);
  const json j = json::parse(a.text);
  CHECK(j["replicates"].size() == 4);
  CHECK(j["summary"]["d_T"]["count"] == 4);
  c.mode = "pn";
  c.n = Endpoint{10, 10};
  c.budget = 2;
  const json pn = json::parse(run_command("limit-shape", c).text);
  CHECK(pn["replicates"][0].contains("status"));
  c.mode = "bogus";
  CHECK(run_command("limit-shape", c).exit_code == kUsageError);
}

TEST_CASE("outputs do not depend on the thread count") {
  ExperimentConfig c;
  c.replicates = 6;
  c.n = Endpoint{500, 500};
  c.threads = 1;
  const std::string one = run_command("limit-shape", c).text;
  c.threads = 3;
  const std::string three = run_command("limit-shape", c).text;
  CHECK(one == three);
  c.format = "csv";
  CHECK(run_command("limit-shape", c).text == run_command("limit-shape", c).text);
  c.threads = 0;
  set_thread_count(0);
}

TEST_CASE("profile command") {
  ExperimentConfig c;
  CHECK(run_command("profile", c).exit_code == kUsageError);
  c.t_grid = {0, 1, kInfinity};
  c.replicates = 20;
  const CommandOutput out = run_command("profile", c);
  const json j = json::parse(out.text);
  CHECK(j["rows"][0]["g_star"] == json::array({0.0, 0.0}));
  CHECK(j["rows"][1]["g_star"] == json::array({0.75, 0.25}));
  CHECK(j["rows"][2]["g_star"] == json::array({1.0, 1.0}));
  CHECK(j["rows"][2]["t"] == "inf");
}

TEST_CASE("verify, sample and enumerate commands") {
  ExperimentConfig c;
  c.suite = "series";
  CHECK(run_command("verify", c).exit_code == kPass);
  c.suite = "assumption71";
  CHECK(run_command("verify", c).exit_code == kPass);
  c.suite = "nope";
  CHECK(run_command("verify", c).exit_code == kUsageError);
  c = ExperimentConfig{};
  c.n = Endpoint{2, 2};
  const json e = json::parse(run_command("enumerate", c).text);
  CHECK(e["count"] == 5);
  c.mode = "pn";
  c.replicates = 3;
  const std::string s = run_command("sample", c).text;
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  CHECK(json::parse(s.substr(0, s.find('\n')))["vertices"].back() == json::array({2, 2}));
  c.budget = 1;
  c.n = Endpoint{200, 200};
  CHECK(run_command("sample", c).exit_code == kResourceError);
  CHECK(run_command("frobnicate", c).exit_code == kUsageError);
}
