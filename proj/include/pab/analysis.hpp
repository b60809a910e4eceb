#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pab/equilibrium.hpp"
#include "pab/market.hpp"

namespace pab {

/// Replaces a supply curve by p -> S(p^2 / p*), which keeps the value at the
/// clearing price (and hence the clearing price itself) while shifting all
/// earlier quantity to higher bid prices. For any curve that is not
/// identically zero below p* this strictly shrinks the integral term and so
/// strictly raises the pay-as-bid utility. Requires p* > 0.
SupplyCurve dominance_transform(const SupplyCurve& supply, double clearing_price);

/// The unique kinked offer with slope `slope_k` that matches the curve's value
/// at the clearing price: breakpoint = p* - S(p*) / K. For a K-Lipschitz curve
/// the offer lies pointwise at or below it up to p*, so it clears at the same
/// price with weakly higher utility.
KinkedOffer kink_improvement(const SupplyCurve& supply, double clearing_price, double slope_k);

/// Breakpoint quadruple ordered componentwise: own_low <= own_high and
/// others_low <= others_high in every coordinate.
struct OrderedQuadruple {
  double own_low = 0.0;
  double own_high = 0.0;
  std::vector<double> others_low;
  std::vector<double> others_high;
};

struct DifferenceViolation {
  OrderedQuadruple quadruple;
  double lhs = 0.0;  // u(own_high, others_high) - u(own_low, others_high)
  double rhs = 0.0;  // u(own_high, others_low)  - u(own_low, others_low)
};

struct IncreasingDifferencesReport {
  std::size_t tested_quadruples = 0;
  std::vector<DifferenceViolation> violations;
  bool is_supermodular_on_sample = false;
};

/// Tests the increasing-differences inequality lhs >= rhs on each quadruple;
/// deficits beyond a 1e-9 slack are recorded as violations.
IncreasingDifferencesReport increasing_differences_check(const Scenario& scenario,
                                                         std::size_t firm_index,
                                                         std::span<const OrderedQuadruple> sample);

std::vector<OrderedQuadruple> random_quadruples(const Scenario& scenario, std::size_t firm_index,
                                                std::size_t count, std::uint64_t seed);

/// True when the firm sells a positive quantity and the number of selling
/// firms is the same at all four corners of the quadruple; increasing
/// differences are only expected to hold inside such regions.
bool constant_active_regime(const Scenario& scenario, std::size_t firm_index,
                            const OrderedQuadruple& quadruple);

struct KSweepRow {
  double lipschitz_k = 0.0;
  std::vector<double> breakpoints;
  double clearing_price = 0.0;
  std::vector<double> utilities;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Re-solves the scenario for each slope bound in `k_values` (positive,
/// distinct) and reports rows in input order. Non-convergence is flagged per
/// row, never thrown.
std::vector<KSweepRow> k_sweep(const Scenario& base_scenario, std::span<const double> k_values,
                               const SolverOptions& options = {});

/// Random member of the K-Lipschitz strategy space: piecewise linear with
/// `segments` pieces whose slopes are drawn uniformly from [0, slope_k].
SupplyCurve random_lipschitz_curve(std::mt19937_64& rng, double price_cap, double slope_k,
                                   std::size_t segments);

}  // namespace pab
