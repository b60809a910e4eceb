// Acceptance suite: every release criterion in one binary, one verdict line
// each. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pab/analysis.hpp"
#include "pab/best_response.hpp"
#include "pab/equilibrium.hpp"
#include "pab/payoff.hpp"
#include "pab/scenario_io.hpp"
#include "test_support.hpp"

using namespace pab;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    ok = false;
    if (!detail.empty()) {
      detail += "; ";
    }
    detail += why;
  }

  void expect(bool cond, const std::string& why) {
    if (!cond) {
      fail(why);
    }
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Scenario load_paper_scenario(const char* name) {
  const auto path = std::filesystem::path(PAB_SCENARIO_DIR) / name;
  return load_scenario_file(path.string()).scenario;
}

void check_equilibrium(Check& c, const Scenario& scenario,
                       const std::vector<double>& breakpoints, double breakpoint_tol,
                       double p_star, double p_star_tol, const std::vector<double>& utilities) {
  const EquilibriumResult eq = find_equilibrium(scenario);
  c.expect(eq.converged, "solver did not converge");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    c.expect(std::abs(eq.breakpoints[i] - breakpoints[i]) <= breakpoint_tol,
             "p_" + std::to_string(i + 1) + " = " + fmt(eq.breakpoints[i]) + ", want " +
                 fmt(breakpoints[i]) + " +- " + fmt(breakpoint_tol));
  }
  c.expect(std::abs(eq.clearing_price - p_star) <= p_star_tol,
           "p* = " + fmt(eq.clearing_price) + ", want " + fmt(p_star) + " +- " + fmt(p_star_tol));
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    c.expect(std::abs(eq.utilities[i] - utilities[i]) <= 0.01 * utilities[i],
             "u_" + std::to_string(i + 1) + " = " + fmt(eq.utilities[i]) + ", want " +
                 fmt(utilities[i]) + " +- 1%");
  }
}

Check criterion_k5() {
  Check c;
  check_equilibrium(c, load_paper_scenario("paper_k5.json"), {5.68, 6.53, 7.09, 7.42}, 0.02,
                    7.79, 0.02, {43.2, 25.25, 13.78, 7.22});
  return c;
}

Check criterion_k10() {
  Check c;
  check_equilibrium(c, load_paper_scenario("paper_k10.json"), {6.36, 6.9, 7.22, 7.39}, 0.02,
                    7.57, 0.02, {47.74, 26.07, 13.66, 7.00});
  return c;
}

Check criterion_k1000() {
  Check c;
  check_equilibrium(c, load_paper_scenario("paper_k1000.json"),
                    {7.261, 7.269, 7.272, 7.274}, 0.005, 7.276, 0.005,
                    {52.84, 26.45, 13.23, 6.62});
  return c;
}

Check criterion_example1() {
  Check c;
  const Scenario sc = load_paper_scenario("example1.json");
  const Firm& firm = sc.firms()[0];
  const double k = sc.lipschitz_k();

  const double stay = restricted_utility(50.0, std::vector<double>{0.0}, k, sc.demand(), firm);
  c.expect(stay == 0.0, "u(50, 0) = " + fmt(stay) + ", want exactly 0");

  const double after = restricted_utility(50.0, std::vector<double>{1.0}, k, sc.demand(), firm);
  c.expect(std::abs(after - 50.0 / 3.0) <= 1e-9,
           "u(50, 1) = " + fmt(after) + ", want 50/3 +- 1e-9");

  const double raised =
      restricted_utility(50.2, std::vector<double>{1.0}, k, sc.demand(), firm);
  c.expect(std::abs(raised - 10.04) <= 0.01, "u(50.2, 1) = " + fmt(raised) + ", want 10.04");

  OrderedQuadruple q;
  q.own_low = 50.0;
  q.own_high = 50.2;
  q.others_low = {0.0};
  q.others_high = {1.0};
  const auto report = increasing_differences_check(sc, 0, std::vector<OrderedQuadruple>{q});
  c.expect(report.violations.size() == 1, "checker did not flag the violation");
  if (!report.violations.empty()) {
    const auto& v = report.violations.front();
    c.expect(std::abs(v.lhs - (-6.63)) <= 0.01, "lhs = " + fmt(v.lhs) + ", want -6.63 +- 0.01");
    c.expect(v.rhs == 0.0, "rhs = " + fmt(v.rhs) + ", want 0");
  }
  return c;
}

Check criterion_clearing_oracle() {
  Check c;
  std::mt19937_64 rng(501);
  double worst = 0.0;
  for (int iter = 0; iter < 1000; ++iter) {
    const Scenario sc = test::random_scenario(rng, 8);
    const double cap = sc.demand().price_cap();
    const auto bps = test::random_breakpoints(rng, sc.firm_count(), cap);

    std::vector<SupplyCurve> curves;
    curves.reserve(bps.size());
    for (double b : bps) {
      curves.push_back(SupplyCurve::from_kinked({b, sc.lipschitz_k()}, cap));
    }
    const double closed = clear_market_kinked(bps, sc.lipschitz_k(), sc.demand());
    const double bisected = clear_market_general(curves, sc.demand());
    worst = std::max(worst, std::abs(closed - bisected));
  }
  c.expect(worst <= 1e-8, "worst closed-form vs bisection gap = " + fmt(worst));
  c.detail = "worst gap " + fmt(worst) + " over 1000 scenarios";
  return c;
}

Check criterion_best_response_oracle() {
  Check c;
  std::mt19937_64 rng(601);
  double worst = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    const Scenario sc = test::random_scenario(rng, 8);
    const auto bps = test::random_breakpoints(rng, sc.firm_count(), sc.demand().price_cap());
    const std::vector<double> others(bps.begin() + 1, bps.end());
    const Firm& firm = sc.firms()[0];

    const double closed =
        best_response(others, sc.lipschitz_k(), sc.demand(), firm).best_utility;
    const double oracle =
        best_response_grid_oracle(others, sc.lipschitz_k(), sc.demand(), firm, 10000)
            .best_utility;
    worst = std::max(worst, oracle - closed);
  }
  c.expect(worst <= 1e-6, "oracle beat the closed form by " + fmt(worst));
  c.detail = "worst shortfall " + fmt(worst) + " over 500 instances";
  return c;
}

Check criterion_dominance() {
  Check c;
  std::mt19937_64 rng(701);
  int accepted = 0;
  double slimmest_integral_gap = 1e300;
  double slimmest_utility_gap = 1e300;
  while (accepted < 200) {
    const Scenario sc = test::random_scenario(rng, 5);
    const double cap = sc.demand().price_cap();
    const double k = sc.lipschitz_k();

    std::vector<SupplyCurve> curves;
    for (double b : test::random_breakpoints(rng, sc.firm_count() - 1, cap)) {
      curves.push_back(SupplyCurve::from_kinked({b, k}, cap));
    }
    const SupplyCurve own = random_lipschitz_curve(rng, cap, k, 6);
    curves.push_back(own);

    const double p_star = clear_market_general(curves, sc.demand());
    if (p_star <= 0.0 || own.integral_to(p_star) < 1e-4) {
      continue;
    }
    ++accepted;

    const SupplyCurve reshaped = dominance_transform(own, p_star);
    const double integral_gap = own.integral_to(p_star) - reshaped.integral_to(p_star);
    slimmest_integral_gap = std::min(slimmest_integral_gap, integral_gap);

    const Firm& firm = sc.firms().back();
    const double utility_gap = pab_utility_general(reshaped, p_star, firm).utility -
                               pab_utility_general(own, p_star, firm).utility;
    slimmest_utility_gap = std::min(slimmest_utility_gap, utility_gap);

    curves.back() = reshaped;
    const double p_after = clear_market_general(curves, sc.demand());
    if (std::abs(p_after - p_star) > 1e-8) {
      c.fail("clearing price moved by " + fmt(std::abs(p_after - p_star)));
    }
  }
  c.expect(slimmest_integral_gap > 1e-9,
           "integral gap not strict: " + fmt(slimmest_integral_gap));
  c.expect(slimmest_utility_gap > 1e-9, "utility gap not strict: " + fmt(slimmest_utility_gap));
  c.detail = "min integral gap " + fmt(slimmest_integral_gap) + ", min utility gap " +
             fmt(slimmest_utility_gap) + " over 200 curves";
  return c;
}

Check criterion_kink_improvement() {
  Check c;
  std::mt19937_64 rng(801);
  int accepted = 0;
  int strict = 0;
  while (accepted < 200) {
    const Scenario sc = test::random_scenario(rng, 5);
    const double cap = sc.demand().price_cap();
    const double k = sc.lipschitz_k();

    std::vector<SupplyCurve> curves;
    for (double b : test::random_breakpoints(rng, sc.firm_count() - 1, cap)) {
      curves.push_back(SupplyCurve::from_kinked({b, k}, cap));
    }
    const SupplyCurve own = random_lipschitz_curve(rng, cap, k, 6);
    curves.push_back(own);

    const double p_star = clear_market_general(curves, sc.demand());
    if (p_star <= 0.0) {
      continue;
    }
    ++accepted;

    const KinkedOffer matched = kink_improvement(own, p_star, k);
    const SupplyCurve matched_curve = SupplyCurve::from_kinked(matched, cap);

    const Firm& firm = sc.firms().back();
    const double before = pab_utility_general(own, p_star, firm).utility;
    const double after = pab_utility_general(matched_curve, p_star, firm).utility;
    if (after < before - 1e-9) {
      c.fail("utility dropped by " + fmt(before - after));
    }
    const double shape_gap = own.integral_to(p_star) - matched_curve.integral_to(p_star);
    if (shape_gap > 1e-6) {
      if (after > before + 1e-9) {
        ++strict;
      } else {
        c.fail("no strict gain for a curve " + fmt(shape_gap) + " away from kinked form");
      }
    }

    curves.back() = matched_curve;
    const double p_after = clear_market_general(curves, sc.demand());
    if (std::abs(p_after - p_star) > 1e-8) {
      c.fail("clearing price moved by " + fmt(std::abs(p_after - p_star)));
    }
  }
  c.expect(strict >= 100, "too few strictly-improving samples: " + std::to_string(strict));
  c.detail = std::to_string(strict) + "/200 strictly improved";
  return c;
}

Check criterion_nash_certificates() {
  Check c;
  for (const char* name : {"paper_k5.json", "paper_k10.json", "paper_k1000.json"}) {
    const Scenario sc = load_paper_scenario(name);
    const EquilibriumResult eq = find_equilibrium(sc);
    c.expect(eq.converged, std::string(name) + ": no convergence");
    const NashCertificate cert = verify_nash(eq.breakpoints, sc, 1e-2, 10000);
    c.expect(cert.passed, std::string(name) + ": certificate failed");
  }
  const Scenario sc = load_paper_scenario("paper_k5.json");
  const NashCertificate zeros =
      verify_nash(std::vector<double>(sc.firm_count(), 0.0), sc, 1e-2, 10000);
  c.expect(!zeros.passed, "all-zero profile certified incorrectly");
  return c;
}

Check criterion_k_sweep() {
  Check c;
  const Scenario sc = load_paper_scenario("paper_k5.json");
  const std::vector<double> ks{5.0, 10.0, 1000.0};
  const auto rows = k_sweep(sc, ks);
  for (const KSweepRow& row : rows) {
    c.expect(row.converged, "K=" + fmt(row.lipschitz_k) + " did not converge");
  }
  c.expect(rows[0].clearing_price > rows[1].clearing_price &&
               rows[1].clearing_price > rows[2].clearing_price,
           "p* not strictly decreasing in K");
  c.expect(rows[0].utilities.front() < rows[1].utilities.front() &&
               rows[1].utilities.front() < rows[2].utilities.front(),
           "u_1 not strictly increasing in K");
  c.expect(rows[0].utilities.back() > rows[1].utilities.back() &&
               rows[1].utilities.back() > rows[2].utilities.back(),
           "u_4 not strictly decreasing in K");

  double worst = 0.0;
  for (double b : rows[2].breakpoints) {
    worst = std::max(worst, std::abs(b - rows[2].clearing_price));
  }
  c.expect(worst <= 0.02, "max |p_i - p*| at K=1000 is " + fmt(worst));
  c.detail = "max |p_i - p*| at K=1000: " + fmt(worst);
  return c;
}

struct Criterion {
  const char* name;
  std::function<Check()> body;
  double time_limit_s;  // 0 = no limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"K=5 equilibrium reproduction", criterion_k5, 1.0},
      {"K=10 equilibrium reproduction", criterion_k10, 1.0},
      {"K=1000 equilibrium reproduction", criterion_k1000, 5.0},
      {"two-firm counterexample reproduction", criterion_example1, 0.0},
      {"clearing closed form vs bisection oracle", criterion_clearing_oracle, 10.0},
      {"best response vs grid oracle", criterion_best_response_oracle, 0.0},
      {"bid reshaping strictly improves", criterion_dominance, 0.0},
      {"kink matching preserves price, improves payoff", criterion_kink_improvement, 0.0},
      {"Nash certificates accept equilibria, reject zeros", criterion_nash_certificates, 0.0},
      {"comparative statics across K", criterion_k_sweep, 0.0},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criteria[i].body();
    } catch (const std::exception& e) {
      result.fail(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[i].time_limit_s > 0.0 && seconds > criteria[i].time_limit_s) {
      result.fail("took " + fmt(seconds) + " s, limit " + fmt(criteria[i].time_limit_s) + " s");
    }
    std::printf("%-4s %2zu  %-48s (%.2f s)%s%s\n", result.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, seconds, result.detail.empty() ? "" : "  -- ",
                result.detail.c_str());
    if (!result.ok) {
      ++failed;
    }
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
