#include "pab/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pab/analysis.hpp"
#include "pab/best_response.hpp"
#include "pab/equilibrium.hpp"
#include "pab/payoff.hpp"
#include "pab/scenario_io.hpp"

namespace pab::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// scenario selection: explicit path or a named preset shipped in scenarios/

struct ScenarioArgs {
  std::string path;
  bool paper_k5 = false;
  bool paper_k10 = false;
  bool paper_k1000 = false;
  bool example1 = false;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
  auto* pos = cmd->add_option("scenario", args.path, "scenario file (JSON)");
  auto* k5 = cmd->add_flag("--paper-k5", args.paper_k5, "preset: four-firm scenario, K=5");
  auto* k10 = cmd->add_flag("--paper-k10", args.paper_k10, "preset: four-firm scenario, K=10");
  auto* k1000 =
      cmd->add_flag("--paper-k1000", args.paper_k1000, "preset: four-firm scenario, K=1000");
  auto* ex1 = cmd->add_flag("--example1", args.example1,
                            "preset: two-firm increasing-differences counterexample");
  std::vector<CLI::Option*> opts{pos, k5, k10, k1000, ex1};
  for (auto* a : opts) {
    for (auto* b : opts) {
      if (a != b) {
        a->excludes(b);
      }
    }
  }
}

std::string preset_filename(const ScenarioArgs& args) {
  if (args.paper_k5) return "paper_k5.json";
  if (args.paper_k10) return "paper_k10.json";
  if (args.paper_k1000) return "paper_k1000.json";
  if (args.example1) return "example1.json";
  return {};
}

std::string resolve_scenario_path(const ScenarioArgs& args) {
  if (!args.path.empty()) {
    return args.path;
  }
  const std::string name = preset_filename(args);
  if (name.empty()) {
    throw ValidationError("a scenario path or one of the presets is required");
  }
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("PAB_SCENARIO_DIR")) {
    dirs.emplace_back(env);
  }
  dirs.emplace_back("scenarios");
  dirs.emplace_back("../scenarios");
  for (const auto& dir : dirs) {
    const auto candidate = dir / name;
    std::error_code ec;
    if (std::filesystem::exists(candidate, ec)) {
      return candidate.string();
    }
  }
  throw IoError("preset scenario '" + name +
                "' not found; set PAB_SCENARIO_DIR or run from the repository root");
}

struct LoadedScenario {
  std::string path;
  ScenarioFile file;
};

LoadedScenario load(const ScenarioArgs& args) {
  const std::string path = resolve_scenario_path(args);
  return {path, load_scenario_file(path)};
}

// ---------------------------------------------------------------------------
// shared output helpers

void print_scenario_line(std::ostream& out, const LoadedScenario& loaded) {
  const Scenario& sc = loaded.file.scenario;
  out << "scenario: " << loaded.path << "  (n=" << sc.firm_count()
      << ", K=" << fmt6(sc.lipschitz_k()) << ", N=" << fmt6(sc.demand().intercept())
      << ", gamma=" << fmt6(sc.demand().slope())
      << ", price cap=" << fmt6(sc.demand().price_cap()) << ")\n";
}

void print_outcome_table(std::ostream& out, const Scenario& scenario,
                         std::span<const double> breakpoints, const MarketOutcome& outcome) {
  out << "firm  cost_c      breakpoint  quantity    utility\n";
  double total = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    total += outcome.quantities[i];
    std::ostringstream row;
    row.setf(std::ios::left);
    row.width(6);
    row << i + 1;
    for (double v : {scenario.firms()[i].cost_coeff, breakpoints[i], outcome.quantities[i],
                     outcome.utilities[i]}) {
      row.width(12);
      row << fmt6(v);
    }
    out << row.str() << "\n";
  }
  out << "total supply = " << fmt6(total)
      << "   demand at p* = " << fmt6(scenario.demand().at(outcome.clearing_price)) << "\n";
}

void print_certificate(std::ostream& out, const NashCertificate& cert) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double g : cert.per_firm_max_gain) {
    worst = std::max(worst, g);
  }
  out << "certificate: epsilon=" << fmt6(cert.epsilon) << "  grid=" << cert.deviation_grid_size
      << "  max gain=" << fmt6(worst) << "  " << (cert.passed ? "PASSED" : "FAILED") << "\n";
}

ordered_json certificate_json(const NashCertificate& cert) {
  return {{"epsilon", cert.epsilon},
          {"per_firm_max_gain", cert.per_firm_max_gain},
          {"deviation_grid_size", cert.deviation_grid_size},
          {"passed", cert.passed}};
}

void emit(std::ostream& out, bool as_json, const ResultRecord& record,
          const std::string& table) {
  if (as_json) {
    out << record.to_json().dump(2) << "\n";
  } else {
    out << table;
  }
}

double env_override_tolerance(double fallback, bool flag_given) {
  if (flag_given) {
    return fallback;
  }
  if (const char* env = std::getenv("PAB_TOLERANCE")) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
      throw ValidationError("PAB_TOLERANCE is not a number");
    }
  }
  return fallback;
}

std::size_t env_threads(std::size_t fallback) {
  if (const char* env = std::getenv("PAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v < 1) {
        throw std::invalid_argument("nonpositive");
      }
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ValidationError("PAB_THREADS must be a positive integer");
    }
  }
  return fallback;
}

// ---------------------------------------------------------------------------
// subcommand state

struct ClearArgs {
  ScenarioArgs scenario;
  std::vector<double> breakpoints;
  bool all_at_cap = false;
  bool json = false;
};

struct SolveArgs {
  ScenarioArgs scenario;
  double tolerance = 0.0;  // filled from file/env unless the flag is used
  bool tolerance_given = false;
  std::size_t max_iterations = 0;
  bool max_iterations_given = false;
  double damping = 0.0;
  bool damping_given = false;
  std::size_t multi_start = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double epsilon = 1e-2;
  std::size_t cert_grid = 10000;
  bool json = false;
};

struct SweepArgs {
  ScenarioArgs scenario;
  std::vector<double> k_values;
  std::string output;
  bool json = false;
};

struct SupermodArgs {
  ScenarioArgs scenario;
  std::size_t firm = 1;  // 1-based in the CLI
  std::size_t grid = 0;
  std::uint64_t seed = 0;
  std::vector<double> own;         // two values: base and raised
  std::vector<double> others;      // opponents, base
  std::vector<double> others_alt;  // opponents, raised
  bool json = false;
};

struct VerifyArgs {
  ScenarioArgs scenario;
  std::vector<double> breakpoints;
  double epsilon = 1e-2;
  std::size_t grid = 10000;
  bool json = false;
};

struct DominateArgs {
  ScenarioArgs scenario;
  std::size_t firm = 1;
  std::uint64_t seed = 1;
  std::size_t segments = 8;
  std::vector<double> opponent_breakpoints;
  bool json = false;
};

SolverOptions solver_options_for(const SolveArgs& args, const ScenarioFile& file) {
  SolverOptions options = file.solver;
  options.tolerance = env_override_tolerance(
      args.tolerance_given ? args.tolerance : options.tolerance, args.tolerance_given);
  if (args.max_iterations_given) {
    options.max_iterations = args.max_iterations;
  }
  if (args.damping_given) {
    options.damping = args.damping;
  }
  if (args.seed_given) {
    options.seed = args.seed;
  }
  options.multi_start = args.multi_start;
  options.threads = env_threads(1);
  return options;
}

ordered_json solver_options_json(const SolverOptions& o) {
  return {{"tolerance", o.tolerance},
          {"max_iterations", o.max_iterations},
          {"damping", o.damping},
          {"multi_start", o.multi_start},
          {"seed", o.seed},
          {"threads", o.threads}};
}

// ---------------------------------------------------------------------------
// command bodies

int cmd_clear(const ClearArgs& args, std::ostream& out) {
  const LoadedScenario loaded = load(args.scenario);
  const Scenario& scenario = loaded.file.scenario;

  std::vector<double> breakpoints = args.breakpoints;
  if (args.all_at_cap) {
    breakpoints.assign(scenario.firm_count(), scenario.demand().price_cap());
  }
  const MarketOutcome outcome = evaluate_profile(breakpoints, scenario);

  ResultRecord record;
  record.command = "clear";
  record.inputs = {{"scenario_path", loaded.path},
                   {"scenario", scenario_to_json(loaded.file)},
                   {"breakpoints", breakpoints}};
  double total = 0.0;
  for (double q : outcome.quantities) {
    total += q;
  }
  record.outputs = {{"p_star", outcome.clearing_price},
                    {"quantities", outcome.quantities},
                    {"utilities", outcome.utilities},
                    {"total_supply", total},
                    {"demand_at_p_star", scenario.demand().at(outcome.clearing_price)}};
  record.diagnostics = {
      {"clearing_residual", scenario.demand().at(outcome.clearing_price) - total}};

  std::ostringstream table;
  print_scenario_line(table, loaded);
  table << "clearing price p* = " << fmt6(outcome.clearing_price) << "\n";
  print_outcome_table(table, scenario, breakpoints, outcome);
  emit(out, args.json, record, table.str());
  return kExitSuccess;
}

int cmd_solve(const SolveArgs& args, std::ostream& out) {
  const LoadedScenario loaded = load(args.scenario);
  const Scenario& scenario = loaded.file.scenario;
  const SolverOptions options = solver_options_for(args, loaded.file);

  const auto t0 = std::chrono::steady_clock::now();
  MultiStartReport report;
  if (options.multi_start > 0) {
    report = find_equilibrium_multistart(scenario, options);
  } else {
    report.primary = find_equilibrium(scenario, options);
  }
  const EquilibriumResult& eq = report.primary;
  const NashCertificate cert =
      verify_nash(eq.breakpoints, scenario, args.epsilon, args.cert_grid);
  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();

  const MarketOutcome outcome = evaluate_profile(eq.breakpoints, scenario);

  ResultRecord record;
  record.command = "solve";
  record.inputs = {{"scenario_path", loaded.path},
                   {"scenario", scenario_to_json(loaded.file)},
                   {"options", solver_options_json(options)},
                   {"epsilon", args.epsilon},
                   {"certificate_grid", args.cert_grid}};
  record.outputs = {{"breakpoints", eq.breakpoints},
                    {"p_star", eq.clearing_price},
                    {"quantities", outcome.quantities},
                    {"utilities", eq.utilities},
                    {"converged", eq.converged},
                    {"iterations", eq.iterations},
                    {"residual", eq.residual},
                    {"certificate", certificate_json(cert)}};
  record.diagnostics = {{"runtime_ms", elapsed}};
  if (options.multi_start > 0) {
    std::size_t restarts_converged = 0;
    for (const auto& r : report.restarts) {
      restarts_converged += r.converged ? 1 : 0;
    }
    record.outputs["multistart"] = {
        {"restarts", report.restarts.size()},
        {"restarts_converged", restarts_converged},
        {"max_breakpoint_spread", report.max_breakpoint_spread},
        {"converged_runs_agree", report.converged_runs_agree}};
  }

  std::ostringstream table;
  print_scenario_line(table, loaded);
  table << "converged: " << (eq.converged ? "yes" : "NO") << "   iterations: " << eq.iterations
        << "   residual: " << fmt6(eq.residual) << "\n";
  table << "clearing price p* = " << fmt6(eq.clearing_price) << "\n";
  print_outcome_table(table, scenario, eq.breakpoints, outcome);
  print_certificate(table, cert);
  if (options.multi_start > 0) {
    table << "multi-start: " << report.restarts.size() << " restarts, spread="
          << fmt6(report.max_breakpoint_spread) << ", "
          << (report.converged_runs_agree ? "agree" : "DISAGREE") << "\n";
  }
  emit(out, args.json, record, table.str());
  return kExitSuccess;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
  const LoadedScenario loaded = load(args.scenario);
  const Scenario& scenario = loaded.file.scenario;

  SolverOptions options = loaded.file.solver;
  options.tolerance = env_override_tolerance(options.tolerance, false);
  const std::vector<KSweepRow> rows = k_sweep(scenario, args.k_values, options);

  std::ofstream file(args.output);
  if (!file) {
    throw IoError("cannot open sweep output '" + args.output + "' for writing");
  }
  const std::size_t n = scenario.firm_count();
  file << "K,converged,iterations,p_star";
  for (std::size_t i = 1; i <= n; ++i) file << ",p_" << i;
  for (std::size_t i = 1; i <= n; ++i) file << ",q_" << i;
  for (std::size_t i = 1; i <= n; ++i) file << ",u_" << i;
  file << "\n";
  for (const KSweepRow& row : rows) {
    file << fmt_full(row.lipschitz_k) << "," << (row.converged ? 1 : 0) << ","
         << row.iterations << "," << fmt_full(row.clearing_price);
    for (double b : row.breakpoints) file << "," << fmt_full(b);
    for (double b : row.breakpoints) {
      const double margin = row.clearing_price - b;
      file << "," << fmt_full(margin > 0.0 ? row.lipschitz_k * margin : 0.0);
    }
    for (double u : row.utilities) file << "," << fmt_full(u);
    file << "\n";
  }
  file.flush();
  if (!file) {
    throw IoError("failed writing sweep output '" + args.output + "'");
  }

  ResultRecord record;
  record.command = "sweep";
  record.inputs = {{"scenario_path", loaded.path},
                   {"scenario", scenario_to_json(loaded.file)},
                   {"K_values", args.k_values},
                   {"output_path", args.output}};
  ordered_json row_json = ordered_json::array();
  for (const KSweepRow& row : rows) {
    row_json.push_back({{"K", row.lipschitz_k},
                        {"breakpoints", row.breakpoints},
                        {"p_star", row.clearing_price},
                        {"utilities", row.utilities},
                        {"converged", row.converged},
                        {"iterations", row.iterations}});
  }
  record.outputs = {{"rows", row_json}};
  record.diagnostics = ordered_json::object();

  std::ostringstream table;
  print_scenario_line(table, loaded);
  table << "K           p*          converged   u_1         u_n\n";
  for (const KSweepRow& row : rows) {
    std::ostringstream line;
    line.setf(std::ios::left);
    for (double v : {row.lipschitz_k, row.clearing_price}) {
      line.width(12);
      line << fmt6(v);
    }
    line.width(12);
    line << (row.converged ? "yes" : "NO");
    line.width(12);
    line << fmt6(row.utilities.front());
    line << fmt6(row.utilities.back());
    table << line.str() << "\n";
  }
  table << "wrote " << rows.size() << " rows to " << args.output << "\n";
  emit(out, args.json, record, table.str());
  return kExitSuccess;
}

int cmd_supermod(const SupermodArgs& args, std::ostream& out) {
  const LoadedScenario loaded = load(args.scenario);
  const Scenario& scenario = loaded.file.scenario;
  if (args.firm == 0 || args.firm > scenario.firm_count()) {
    throw DomainError("firm index must be in [1, " + std::to_string(scenario.firm_count()) + "]");
  }
  const std::size_t firm_index = args.firm - 1;

  std::vector<OrderedQuadruple> sample;
  ordered_json sample_spec;
  if (args.grid > 0) {
    sample = random_quadruples(scenario, firm_index, args.grid, args.seed);
    sample_spec = {{"grid", args.grid}, {"seed", args.seed}};
  } else {
    OrderedQuadruple q;
    q.own_low = args.own.at(0);
    q.own_high = args.own.at(1);
    q.others_low = args.others;
    q.others_high = args.others_alt;
    sample.push_back(std::move(q));
    sample_spec = {{"own", args.own},
                   {"others", args.others},
                   {"others_alt", args.others_alt}};
  }

  const IncreasingDifferencesReport report =
      increasing_differences_check(scenario, firm_index, sample);

  ResultRecord record;
  record.command = "supermod";
  record.inputs = {{"scenario_path", loaded.path},
                   {"scenario", scenario_to_json(loaded.file)},
                   {"firm", args.firm},
                   {"sample", sample_spec}};
  ordered_json violations = ordered_json::array();
  for (const DifferenceViolation& v : report.violations) {
    violations.push_back({{"own_low", v.quadruple.own_low},
                          {"own_high", v.quadruple.own_high},
                          {"others_low", v.quadruple.others_low},
                          {"others_high", v.quadruple.others_high},
                          {"lhs", v.lhs},
                          {"rhs", v.rhs}});
  }
  record.outputs = {{"tested_quadruples", report.tested_quadruples},
                    {"violations", violations},
                    {"is_supermodular_on_sample", report.is_supermodular_on_sample}};
  record.diagnostics = ordered_json::object();

  std::ostringstream table;
  print_scenario_line(table, loaded);
  table << "firm " << args.firm << ", tested " << report.tested_quadruples << " quadruple(s), "
        << report.violations.size() << " violation(s)\n";
  const std::size_t shown = std::min<std::size_t>(report.violations.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    const DifferenceViolation& v = report.violations[i];
    table << "  VIOLATION own " << fmt6(v.quadruple.own_low) << "->"
          << fmt6(v.quadruple.own_high) << ": lhs = " << fmt6(v.lhs)
          << " < rhs = " << fmt6(v.rhs) << "\n";
  }
  if (report.violations.size() > shown) {
    table << "  ... " << (report.violations.size() - shown) << " more\n";
  }
  if (sample.size() == 1) {
    table << "constant-active-regime quadruple: "
          << (constant_active_regime(scenario, firm_index, sample.front()) ? "yes" : "no")
          << "\n";
  }
  table << "increasing differences on sample: "
        << (report.is_supermodular_on_sample ? "HOLD" : "VIOLATED") << "\n";
  emit(out, args.json, record, table.str());
  return kExitSuccess;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  const LoadedScenario loaded = load(args.scenario);
  const Scenario& scenario = loaded.file.scenario;

  const NashCertificate cert =
      verify_nash(args.breakpoints, scenario, args.epsilon, args.grid);

  ResultRecord record;
  record.command = "verify";
  record.inputs = {{"scenario_path", loaded.path},
                   {"scenario", scenario_to_json(loaded.file)},
                   {"breakpoints", args.breakpoints},
                   {"epsilon", args.epsilon},
                   {"grid", args.grid}};
  record.outputs = {{"certificate", certificate_json(cert)}};
  record.diagnostics = ordered_json::object();

  std::ostringstream table;
  print_scenario_line(table, loaded);
  table << "firm  breakpoint  max gain\n";
  for (std::size_t i = 0; i < args.breakpoints.size(); ++i) {
    std::ostringstream line;
    line.setf(std::ios::left);
    line.width(6);
    line << i + 1;
    line.width(12);
    line << fmt6(args.breakpoints[i]);
    line << fmt6(cert.per_firm_max_gain[i]);
    table << line.str() << "\n";
  }
  print_certificate(table, cert);
  emit(out, args.json, record, table.str());
  return kExitSuccess;
}

int cmd_dominate(const DominateArgs& args, std::ostream& out) {
  const LoadedScenario loaded = load(args.scenario);
  const Scenario& scenario = loaded.file.scenario;
  if (args.firm == 0 || args.firm > scenario.firm_count()) {
    throw DomainError("firm index must be in [1, " + std::to_string(scenario.firm_count()) + "]");
  }
  const std::size_t firm_index = args.firm - 1;
  const double cap = scenario.demand().price_cap();
  const double k = scenario.lipschitz_k();

  std::vector<double> opponents = args.opponent_breakpoints;
  if (opponents.empty() && scenario.firm_count() > 1) {
    const EquilibriumResult eq = find_equilibrium(scenario, loaded.file.solver);
    for (std::size_t i = 0; i < eq.breakpoints.size(); ++i) {
      if (i != firm_index) {
        opponents.push_back(eq.breakpoints[i]);
      }
    }
  }
  if (opponents.size() + 1 != scenario.firm_count()) {
    throw DomainError("expected one opponent breakpoint per opposing firm");
  }

  std::mt19937_64 rng(args.seed);
  const SupplyCurve own = random_lipschitz_curve(rng, cap, k, args.segments);

  std::vector<SupplyCurve> curves;
  for (double b : opponents) {
    curves.push_back(SupplyCurve::from_kinked({b, k}, cap));
  }
  curves.push_back(own);
  const double p_star = clear_market_general(curves, scenario.demand());
  const Firm& firm = scenario.firms()[firm_index];

  const UtilityBreakdown original = pab_utility_general(own, p_star, firm);

  const SupplyCurve dominated = dominance_transform(own, p_star);
  const UtilityBreakdown transformed = pab_utility_general(dominated, p_star, firm);
  curves.back() = dominated;
  const double p_star_transformed = clear_market_general(curves, scenario.demand());

  const KinkedOffer matched = kink_improvement(own, p_star, k);
  const SupplyCurve matched_curve = SupplyCurve::from_kinked(matched, cap);
  const UtilityBreakdown kinked = pab_utility_general(matched_curve, p_star, firm);
  curves.back() = matched_curve;
  const double p_star_kinked = clear_market_general(curves, scenario.demand());

  ResultRecord record;
  record.command = "dominate";
  ordered_json nodes = ordered_json::array();
  for (const CurveNode& n : own.nodes()) {
    nodes.push_back({{"price", n.price}, {"quantity", n.quantity}});
  }
  record.inputs = {{"scenario_path", loaded.path},
                   {"scenario", scenario_to_json(loaded.file)},
                   {"firm", args.firm},
                   {"seed", args.seed},
                   {"segments", args.segments},
                   {"opponent_breakpoints", opponents},
                   {"curve_nodes", nodes}};
  record.outputs = {{"p_star", p_star},
                    {"p_star_transformed", p_star_transformed},
                    {"p_star_kinked", p_star_kinked},
                    {"utility_original", original.utility},
                    {"utility_transformed", transformed.utility},
                    {"utility_kinked", kinked.utility},
                    {"kink_breakpoint", matched.breakpoint}};
  record.diagnostics = {{"revenue_original", original.revenue},
                        {"revenue_transformed", transformed.revenue},
                        {"revenue_kinked", kinked.revenue}};

  std::ostringstream table;
  print_scenario_line(table, loaded);
  table << "firm " << args.firm << " plays a random " << fmt6(k)
        << "-Lipschitz curve with " << args.segments << " segments (seed " << args.seed
        << ")\n";
  table << "clearing price p* = " << fmt6(p_star)
        << " (transformed: " << fmt6(p_star_transformed)
        << ", kinked: " << fmt6(p_star_kinked) << ")\n";
  table << "utility original    = " << fmt6(original.utility) << "\n";
  table << "utility transformed = " << fmt6(transformed.utility) << "  (bid reshaping)\n";
  table << "utility kinked      = " << fmt6(kinked.utility) << "  (breakpoint "
        << fmt6(matched.breakpoint) << ")\n";
  emit(out, args.json, record, table.str());
  return kExitSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pay-as-bid supply-function auction solver"};
  app.require_subcommand(1);

  ClearArgs clear_args;
  auto* clear = app.add_subcommand("clear", "clear the market for a breakpoint profile");
  add_scenario_options(clear, clear_args.scenario);
  auto* bp_opt = clear->add_option("--breakpoints", clear_args.breakpoints,
                                   "one breakpoint per firm (comma separated)")
                     ->delimiter(',');
  clear->add_flag("--all-at-cap", clear_args.all_at_cap, "zero supply: every firm at the cap")
      ->excludes(bp_opt);
  clear->add_flag("--json", clear_args.json, "emit a result record instead of a table");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "find an equilibrium by damped best response");
  add_scenario_options(solve, solve_args.scenario);
  auto* tol_opt = solve->add_option("--tolerance", solve_args.tolerance,
                                    "fixed-point tolerance on breakpoints");
  auto* iter_opt =
      solve->add_option("--max-iterations", solve_args.max_iterations, "iteration cap");
  auto* damp_opt = solve->add_option("--damping", solve_args.damping, "step in (0, 1]");
  solve->add_option("--multi-start", solve_args.multi_start, "random restarts to probe");
  auto* seed_opt = solve->add_option("--seed", solve_args.seed, "restart RNG seed");
  solve->add_option("--epsilon", solve_args.epsilon, "certificate tolerance");
  solve->add_option("--cert-grid", solve_args.cert_grid, "certificate deviation grid size");
  solve->add_flag("--json", solve_args.json, "emit a result record instead of a table");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "re-solve across slope bounds K");
  add_scenario_options(sweep, sweep_args.scenario);
  sweep->add_option("--K", sweep_args.k_values, "slope bounds (comma separated)")
      ->delimiter(',')
      ->required();
  sweep->add_option("--output", sweep_args.output, "CSV output path")->required();
  sweep->add_flag("--json", sweep_args.json, "emit a result record instead of a table");

  SupermodArgs supermod_args;
  auto* supermod =
      app.add_subcommand("supermod", "test increasing differences of the restricted game");
  add_scenario_options(supermod, supermod_args.scenario);
  supermod->add_option("--firm", supermod_args.firm, "firm under test (1-based)");
  auto* grid_opt =
      supermod->add_option("--grid", supermod_args.grid, "number of random quadruples");
  supermod->add_option("--seed", supermod_args.seed, "quadruple RNG seed");
  auto* own_opt = supermod
                      ->add_option("--own", supermod_args.own,
                                   "own breakpoint pair: base,raised")
                      ->delimiter(',')
                      ->expected(2);
  auto* others_opt = supermod
                         ->add_option("--others", supermod_args.others,
                                      "opponent breakpoints, base (comma separated)")
                         ->delimiter(',');
  auto* others_alt_opt = supermod
                             ->add_option("--others-alt", supermod_args.others_alt,
                                          "opponent breakpoints, raised (comma separated)")
                             ->delimiter(',');
  grid_opt->excludes(own_opt)->excludes(others_opt)->excludes(others_alt_opt);
  supermod->add_flag("--json", supermod_args.json, "emit a result record instead of a table");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "certify a breakpoint profile as epsilon-Nash");
  add_scenario_options(verify, verify_args.scenario);
  verify->add_option("--breakpoints", verify_args.breakpoints, "profile to certify")
      ->delimiter(',')
      ->required();
  verify->add_option("--epsilon", verify_args.epsilon, "certificate tolerance");
  verify->add_option("--grid", verify_args.grid, "deviation grid size");
  verify->add_flag("--json", verify_args.json, "emit a result record instead of a table");

  DominateArgs dominate_args;
  auto* dominate = app.add_subcommand(
      "dominate", "show bid reshaping and kink matching on a random curve");
  add_scenario_options(dominate, dominate_args.scenario);
  dominate->add_option("--firm", dominate_args.firm, "firm playing the curve (1-based)");
  dominate->add_option("--seed", dominate_args.seed, "curve RNG seed");
  dominate->add_option("--segments", dominate_args.segments, "curve segment count");
  dominate
      ->add_option("--breakpoints", dominate_args.opponent_breakpoints,
                   "opponent breakpoints (default: their equilibrium offers)")
      ->delimiter(',');
  dominate->add_flag("--json", dominate_args.json, "emit a result record instead of a table");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("pab");
  for (const std::string& a : args) {
    argv.push_back(a.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParse;
  }

  try {
    if (app.got_subcommand(clear)) {
      if (!clear_args.all_at_cap && clear_args.breakpoints.empty()) {
        err << "error: clear needs --breakpoints or --all-at-cap\n";
        return kExitParse;
      }
      return cmd_clear(clear_args, out);
    }
    if (app.got_subcommand(solve)) {
      solve_args.tolerance_given = tol_opt->count() > 0;
      solve_args.max_iterations_given = iter_opt->count() > 0;
      solve_args.damping_given = damp_opt->count() > 0;
      solve_args.seed_given = seed_opt->count() > 0;
      return cmd_solve(solve_args, out);
    }
    if (app.got_subcommand(sweep)) {
      return cmd_sweep(sweep_args, out);
    }
    if (app.got_subcommand(supermod)) {
      if (supermod_args.grid == 0 && supermod_args.scenario.example1 &&
          supermod_args.own.empty()) {
        // Preset quadruple of the shipped two-firm counterexample.
        supermod_args.own = {50.0, 50.2};
        supermod_args.others = {0.0};
        supermod_args.others_alt = {1.0};
      }
      if (supermod_args.grid == 0 &&
          (supermod_args.own.size() != 2 || supermod_args.others.empty() ||
           supermod_args.others_alt.empty())) {
        err << "error: supermod needs --grid or the quadruple flags --own/--others/--others-alt\n";
        return kExitParse;
      }
      return cmd_supermod(supermod_args, out);
    }
    if (app.got_subcommand(verify)) {
      return cmd_verify(verify_args, out);
    }
    if (app.got_subcommand(dominate)) {
      return cmd_dominate(dominate_args, out);
    }
    err << "error: no subcommand\n";
    return kExitParse;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run(args, std::cout, std::cerr);
}

}  // namespace pab::cli
