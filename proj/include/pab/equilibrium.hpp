#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pab/market.hpp"

namespace pab {

struct SolverOptions {
  double tolerance = 1e-8;          // max best-response displacement at a fixed point
  std::size_t max_iterations = 100000;
  double damping = 0.5;             // step toward the best response, in (0, 1]
  std::size_t multi_start = 0;      // extra random restarts on top of the default start
  std::uint64_t seed = 0;
  std::size_t threads = 1;          // worker threads for restarts
};

struct EquilibriumResult {
  std::vector<double> breakpoints;
  double clearing_price = 0.0;
  std::vector<double> utilities;
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;  // max per-firm best-response displacement at termination
};

/// Damped simultaneous best-response iteration from the all-at-cap profile.
/// Non-convergence is reported through the flags, never thrown.
EquilibriumResult find_equilibrium(const Scenario& scenario, const SolverOptions& options = {});

/// Restart probe for uniqueness: the deterministic run plus `multi_start`
/// uniformly drawn starting profiles. Disagreement is reported, not resolved.
struct MultiStartReport {
  EquilibriumResult primary;
  std::vector<EquilibriumResult> restarts;
  double max_breakpoint_spread = 0.0;  // across converged runs, per-firm range maximum
  bool converged_runs_agree = true;
};

MultiStartReport find_equilibrium_multistart(const Scenario& scenario,
                                             const SolverOptions& options);

/// Numerical Nash certificate: for every firm, the best utility gain over
/// unilateral deviations (closed-form best response plus a uniform deviation
/// grid) must stay within epsilon.
struct NashCertificate {
  double epsilon = 0.0;
  std::vector<double> per_firm_max_gain;
  std::size_t deviation_grid_size = 0;
  bool passed = false;
};

NashCertificate verify_nash(std::span<const double> breakpoints, const Scenario& scenario,
                            double epsilon, std::size_t deviation_grid_size);

}  // namespace pab
