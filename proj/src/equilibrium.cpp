#include "pab/equilibrium.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "pab/best_response.hpp"
#include "pab/payoff.hpp"

namespace pab {

namespace {

void check_options(const SolverOptions& options) {
  if (!(options.tolerance > 0.0) || !std::isfinite(options.tolerance)) {
    throw DomainError("solver tolerance must be positive");
  }
  if (!(options.damping > 0.0) || options.damping > 1.0) {
    throw DomainError("solver damping must lie in (0, 1]");
  }
  if (options.max_iterations == 0) {
    throw DomainError("solver iteration cap must be positive");
  }
}

std::vector<double> others_of(const std::vector<double>& profile, std::size_t self) {
  std::vector<double> others;
  others.reserve(profile.size() - 1);
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j != self) {
      others.push_back(profile[j]);
    }
  }
  return others;
}

EquilibriumResult iterate_from(std::vector<double> profile, const Scenario& scenario,
                               const SolverOptions& options) {
  const std::size_t n = scenario.firm_count();
  const double k = scenario.lipschitz_k();

  EquilibriumResult result;
  std::vector<double> responses(n);
  double residual = 0.0;

  const auto response_residual = [&]() {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto others = others_of(profile, i);
      responses[i] = best_response(others, k, scenario.demand(), scenario.firms()[i])
                         .best_breakpoint;
      worst = std::max(worst, std::abs(responses[i] - profile[i]));
    }
    return worst;
  };

  std::size_t sweep = 0;
  bool converged = false;
  for (; sweep < options.max_iterations; ++sweep) {
    residual = response_residual();
    if (residual <= options.tolerance) {
      converged = true;
      ++sweep;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      profile[i] = (1.0 - options.damping) * profile[i] + options.damping * responses[i];
    }
  }
  if (!converged) {
    residual = response_residual();  // describe the profile actually returned
  }

  result.breakpoints = std::move(profile);
  result.iterations = sweep;
  result.converged = converged;
  result.residual = residual;

  const MarketOutcome outcome = evaluate_profile(result.breakpoints, scenario);
  result.clearing_price = outcome.clearing_price;
  result.utilities = outcome.utilities;
  return result;
}

}  // namespace

EquilibriumResult find_equilibrium(const Scenario& scenario, const SolverOptions& options) {
  check_options(options);
  std::vector<double> start(scenario.firm_count(), scenario.demand().price_cap());
  return iterate_from(std::move(start), scenario, options);
}

MultiStartReport find_equilibrium_multistart(const Scenario& scenario,
                                             const SolverOptions& options) {
  check_options(options);
  MultiStartReport report;
  report.primary = find_equilibrium(scenario, options);

  const std::size_t n = scenario.firm_count();
  const double cap = scenario.demand().price_cap();

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(0.0, cap);
  std::vector<std::vector<double>> starts(options.multi_start);
  for (auto& s : starts) {
    s.resize(n);
    for (double& v : s) {
      v = uniform(rng);
    }
  }

  report.restarts.resize(starts.size());
  const std::size_t workers = std::max<std::size_t>(1, options.threads);
  if (workers == 1 || starts.size() <= 1) {
    for (std::size_t r = 0; r < starts.size(); ++r) {
      report.restarts[r] = iterate_from(std::move(starts[r]), scenario, options);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < std::min(workers, starts.size()); ++w) {
      pool.emplace_back([&]() {
        for (std::size_t r = next.fetch_add(1); r < starts.size(); r = next.fetch_add(1)) {
          report.restarts[r] = iterate_from(std::move(starts[r]), scenario, options);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  // Per-firm range across all converged runs.
  std::vector<const EquilibriumResult*> converged;
  if (report.primary.converged) {
    converged.push_back(&report.primary);
  }
  for (const auto& r : report.restarts) {
    if (r.converged) {
      converged.push_back(&r);
    }
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < n && converged.size() > 1; ++i) {
    double lo = converged.front()->breakpoints[i];
    double hi = lo;
    for (const auto* r : converged) {
      lo = std::min(lo, r->breakpoints[i]);
      hi = std::max(hi, r->breakpoints[i]);
    }
    spread = std::max(spread, hi - lo);
  }
  report.max_breakpoint_spread = spread;
  report.converged_runs_agree = spread <= 1e-6 * std::max(1.0, cap);
  return report;
}

NashCertificate verify_nash(std::span<const double> breakpoints, const Scenario& scenario,
                            double epsilon, std::size_t deviation_grid_size) {
  if (breakpoints.size() != scenario.firm_count()) {
    throw DomainError("breakpoint count does not match the number of firms");
  }
  if (!(epsilon > 0.0)) {
    throw DomainError("certificate epsilon must be positive");
  }
  if (deviation_grid_size < 2) {
    throw DomainError("certificate deviation grid needs at least two points");
  }

  const double k = scenario.lipschitz_k();
  const double cap = scenario.demand().price_cap();
  std::vector<double> profile(breakpoints.begin(), breakpoints.end());

  NashCertificate cert;
  cert.epsilon = epsilon;
  cert.deviation_grid_size = deviation_grid_size;
  cert.per_firm_max_gain.resize(profile.size());

  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto others = others_of(profile, i);
    const Firm& firm = scenario.firms()[i];
    const double stay = restricted_utility(profile[i], others, k, scenario.demand(), firm);

    double best = best_response(others, k, scenario.demand(), firm).best_utility;
    if (cap > 0.0) {
      const double step = cap / static_cast<double>(deviation_grid_size - 1);
      for (std::size_t g = 0; g < deviation_grid_size; ++g) {
        const double x = std::min(static_cast<double>(g) * step, cap);
        best = std::max(best, restricted_utility(x, others, k, scenario.demand(), firm));
      }
    }
    cert.per_firm_max_gain[i] = best - stay;
  }

  cert.passed = std::all_of(cert.per_firm_max_gain.begin(), cert.per_firm_max_gain.end(),
                            [&](double g) { return g <= epsilon; });
  return cert;
}

}  // namespace pab
