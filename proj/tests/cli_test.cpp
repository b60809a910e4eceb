#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pab/cli.hpp"
#include "pab/scenario_io.hpp"

using namespace pab;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  static const int env_once = setenv("PAB_SCENARIO_DIR", PAB_SCENARIO_DIR, 1);
  (void)env_once;
  std::ostringstream out;
  std::ostringstream err;
  RunResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Exit codes as the shell sees them, via the real binary.
int run_binary(const std::string& args) {
  const std::string cmd = std::string("PAB_SCENARIO_DIR=") + PAB_SCENARIO_DIR + " " +
                          PAB_CLI_BIN + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream f(path);
  f << body;
  f.close();
  return path.string();
}

}  // namespace

TEST_CASE("clear prints the published K=5 price") {
  const RunResult r =
      run_cli({"clear", "--paper-k5", "--breakpoints", "5.68,6.53,7.09,7.42"});
  CHECK(r.code == 0);
  CHECK(r.out.find("7.78667") != std::string::npos);
}

TEST_CASE("clear with every offer at the cap returns the cap") {
  const RunResult r = run_cli({"clear", "--paper-k5", "--all-at-cap"});
  CHECK(r.code == 0);
  CHECK(r.out.find("p* = 10") != std::string::npos);
}

TEST_CASE("solve reproduces the published K=10 table") {
  const RunResult r = run_cli({"solve", "--paper-k10"});
  CHECK(r.code == 0);
  CHECK(r.out.find("converged: yes") != std::string::npos);
  CHECK(r.out.find("7.57") != std::string::npos);
  CHECK(r.out.find("PASSED") != std::string::npos);
}

TEST_CASE("solve records round-trip losslessly") {
  const RunResult r = run_cli({"solve", "--paper-k5", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  const ResultRecord record = ResultRecord::from_json(doc);
  CHECK(record.command == "solve");
  CHECK(record.outputs.at("converged").get<bool>());

  const ResultRecord reparsed =
      ResultRecord::from_json(nlohmann::ordered_json::parse(record.to_json().dump()));
  CHECK(reparsed == record);

  // doubles survive the round trip bit for bit
  CHECK(reparsed.outputs.at("p_star").get<double>() ==
        record.outputs.at("p_star").get<double>());
}

TEST_CASE("seeded multi-start output is identical across runs") {
  const std::vector<std::string> table_args{"solve", "--paper-k5", "--multi-start", "4",
                                            "--seed", "7"};
  const RunResult a = run_cli(table_args);
  const RunResult b = run_cli(table_args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  // records match too, apart from wall-clock diagnostics
  std::vector<std::string> json_args = table_args;
  json_args.push_back("--json");
  const auto doc_a = nlohmann::ordered_json::parse(run_cli(json_args).out);
  const auto doc_b = nlohmann::ordered_json::parse(run_cli(json_args).out);
  CHECK(doc_a.at("inputs") == doc_b.at("inputs"));
  CHECK(doc_a.at("outputs") == doc_b.at("outputs"));
}

TEST_CASE("non-convergence is reported, not an error") {
  const RunResult r = run_cli({"solve", "--paper-k5", "--max-iterations", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("converged: NO") != std::string::npos);
  CHECK(r.out.find("residual") != std::string::npos);
}

// Two identical zero-cost firms with K far above gamma: the undamped
// simultaneous iteration rides a near-two-cycle for thousands of sweeps.
TEST_CASE("undamped oscillation is data, not an error") {
  const std::string adversarial = write_temp("pab_oscillating.json", R"({
    "schema_version": "pab.scenario/1",
    "demand": {"N": 100.0, "gamma": 0.3},
    "firms": [{"c": 0.0}, {"c": 0.0}],
    "K": 1000.0
  })");
  const RunResult r = run_cli(
      {"solve", adversarial, "--damping", "1", "--max-iterations", "2000", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  CHECK_FALSE(doc.at("outputs").at("converged").get<bool>());
  CHECK(doc.at("outputs").at("residual").get<double>() > 1e-3);
  CHECK(doc.at("outputs").at("certificate").is_object());

  // the default damping clears the same scenario
  const RunResult damped = run_cli({"solve", adversarial});
  CHECK(damped.code == 0);
  CHECK(damped.out.find("converged: yes") != std::string::npos);
}

TEST_CASE("sweep of a single K matches solve") {
  const auto csv = (std::filesystem::temp_directory_path() / "pab_sweep_one.csv").string();
  const RunResult sweep = run_cli({"sweep", "--paper-k5", "--K", "5", "--output", csv, "--json"});
  const RunResult solve = run_cli({"solve", "--paper-k5", "--json"});
  REQUIRE(sweep.code == 0);
  REQUIRE(solve.code == 0);

  const auto sweep_doc = nlohmann::ordered_json::parse(sweep.out);
  const auto solve_doc = nlohmann::ordered_json::parse(solve.out);
  const auto& row = sweep_doc.at("outputs").at("rows").at(0);
  CHECK(row.at("p_star").get<double>() ==
        solve_doc.at("outputs").at("p_star").get<double>());
  CHECK(row.at("breakpoints").get<std::vector<double>>() ==
        solve_doc.at("outputs").at("breakpoints").get<std::vector<double>>());

  std::ifstream csv_in(csv);
  std::string header;
  std::getline(csv_in, header);
  CHECK(header == "K,converged,iterations,p_star,p_1,p_2,p_3,p_4,q_1,q_2,q_3,q_4,u_1,u_2,u_3,u_4");
}

TEST_CASE("supermod replays the shipped counterexample") {
  const RunResult r = run_cli({"supermod", "--example1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("VIOLATION") != std::string::npos);
  CHECK(r.out.find("-6.62667") != std::string::npos);
  CHECK(r.out.find("rhs = 0") != std::string::npos);
}

TEST_CASE("supermod grid sampling is reproducible") {
  const std::vector<std::string> args{"supermod", "--paper-k5", "--grid", "64",
                                      "--seed",   "11",         "--json"};
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto doc = nlohmann::ordered_json::parse(a.out);
  CHECK(doc.at("outputs").at("tested_quadruples").get<int>() == 64);
}

TEST_CASE("verify certifies the solved profile and rejects zeros") {
  const RunResult solve = run_cli({"solve", "--paper-k5", "--json"});
  REQUIRE(solve.code == 0);
  const auto doc = nlohmann::ordered_json::parse(solve.out);
  const auto bps = doc.at("outputs").at("breakpoints").get<std::vector<double>>();
  std::ostringstream list;
  for (std::size_t i = 0; i < bps.size(); ++i) {
    list << (i ? "," : "") << std::setprecision(17) << bps[i];
  }

  const RunResult good = run_cli({"verify", "--paper-k5", "--breakpoints", list.str()});
  CHECK(good.code == 0);
  CHECK(good.out.find("PASSED") != std::string::npos);

  const RunResult bad = run_cli({"verify", "--paper-k5", "--breakpoints", "0,0,0,0"});
  CHECK(bad.code == 0);
  CHECK(bad.out.find("FAILED") != std::string::npos);
}

TEST_CASE("dominate demo improves the random curve without moving the price") {
  const RunResult r = run_cli({"dominate", "--paper-k5", "--seed", "5", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::ordered_json::parse(r.out);
  const auto& out = doc.at("outputs");
  CHECK(out.at("utility_transformed").get<double>() >=
        out.at("utility_original").get<double>());
  CHECK(out.at("utility_kinked").get<double>() >= out.at("utility_original").get<double>());
  CHECK(std::abs(out.at("p_star").get<double>() -
                 out.at("p_star_transformed").get<double>()) <= 1e-8);
  CHECK(std::abs(out.at("p_star").get<double>() - out.at("p_star_kinked").get<double>()) <=
        1e-8);
}

TEST_CASE("scenario schema violations name the offending key") {
  const std::string unknown = write_temp("pab_unknown_key.json", R"({
    "schema_version": "pab.scenario/1",
    "demand": {"N": 100.0, "gamma": 10.0, "elasticity": 2.0},
    "firms": [{"c": 0.25}],
    "K": 5.0
  })");
  const RunResult r = run_cli({"clear", unknown, "--all-at-cap"});
  CHECK(r.code == cli::kExitParse);
  CHECK(r.err.find("elasticity") != std::string::npos);

  const std::string malformed = write_temp("pab_malformed.json", "{ not json");
  const RunResult m = run_cli({"clear", malformed, "--all-at-cap"});
  CHECK(m.code == cli::kExitParse);
  CHECK(m.err.find("malformed") != std::string::npos);
  CHECK(m.err.find("line") != std::string::npos);  // position diagnostic

  const std::string wrong_version = write_temp("pab_wrong_version.json", R"({
    "schema_version": "pab.scenario/9",
    "demand": {"N": 100.0, "gamma": 10.0},
    "firms": [{"c": 0.25}],
    "K": 5.0
  })");
  const RunResult v = run_cli({"clear", wrong_version, "--all-at-cap"});
  CHECK(v.code == cli::kExitParse);
}

TEST_CASE("shipped scenario files parse back to their own serialization") {
  for (const char* name : {"paper_k5.json", "paper_k10.json", "paper_k1000.json",
                           "example1.json"}) {
    const auto path = std::filesystem::path(PAB_SCENARIO_DIR) / name;
    const ScenarioFile file = load_scenario_file(path.string());
    const ScenarioFile reparsed = parse_scenario_json(scenario_to_json(file));
    CHECK(reparsed.scenario.demand().intercept() == file.scenario.demand().intercept());
    CHECK(reparsed.scenario.lipschitz_k() == file.scenario.lipschitz_k());
    CHECK(reparsed.scenario.firm_count() == file.scenario.firm_count());
    CHECK(reparsed.solver.tolerance == file.solver.tolerance);
  }
}

TEST_CASE("exit code contract through the real binary") {
  CHECK(run_binary("solve --paper-k5") == 0);
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("solve --no-such-flag") == 2);
  CHECK(run_binary("clear missing_file.json --all-at-cap") == 4);
  CHECK(run_binary("clear --paper-k5 --breakpoints 1,2,3,11") == 3);
  CHECK(run_binary("clear --paper-k5 --breakpoints 1,2") == 3);
  CHECK(run_binary("sweep --paper-k5 --K 5,5 --output /tmp/pab_dup.csv") == 2);
  CHECK(run_binary("sweep --paper-k5 --K 5 --output /nonexistent_dir/x.csv") == 4);
  CHECK(run_binary("supermod --example1 --own 50,49 --others 0 --others-alt 1") == 3);
  CHECK(run_binary("solve --paper-k5 --max-iterations 2") == 0);
}

TEST_CASE("environment overrides are validated") {
  setenv("PAB_TOLERANCE", "not-a-number", 1);
  const RunResult r = run_cli({"solve", "--paper-k5"});
  unsetenv("PAB_TOLERANCE");
  CHECK(r.code == cli::kExitParse);

  setenv("PAB_TOLERANCE", "1e-6", 1);
  const RunResult ok = run_cli({"solve", "--paper-k5", "--json"});
  unsetenv("PAB_TOLERANCE");
  REQUIRE(ok.code == 0);
  const auto doc = nlohmann::ordered_json::parse(ok.out);
  CHECK(doc.at("inputs").at("options").at("tolerance").get<double>() == 1e-6);

  setenv("PAB_THREADS", "0", 1);
  const RunResult bad_threads = run_cli({"solve", "--paper-k5"});
  unsetenv("PAB_THREADS");
  CHECK(bad_threads.code == cli::kExitParse);

  // worker count changes the schedule only, never the record
  const std::vector<std::string> ms{"solve", "--paper-k5", "--multi-start", "4",
                                    "--seed", "3",         "--json"};
  setenv("PAB_THREADS", "2", 1);
  const RunResult two = run_cli(ms);
  unsetenv("PAB_THREADS");
  const RunResult one = run_cli(ms);
  CHECK(nlohmann::ordered_json::parse(two.out).at("outputs") ==
        nlohmann::ordered_json::parse(one.out).at("outputs"));
}
