#pragma once

#include <span>

#include "pab/market.hpp"

namespace pab {

/// Pay-as-bid terms for a single firm at the clearing price.
/// revenue = p* S(p*) - int_0^{p*} S, cost = C(S(p*)), utility = revenue - cost.
struct UtilityBreakdown {
  double revenue = 0.0;
  double cost = 0.0;
  double utility = 0.0;
};

/// Pay-as-bid utility of an arbitrary supply curve at a given clearing price.
/// The integral term is evaluated exactly on the piecewise-linear nodes.
UtilityBreakdown pab_utility_general(const SupplyCurve& supply, double clearing_price,
                                     const Firm& firm);

/// Utility of a kinked offer at `own_breakpoint` against kinked opponents, in
/// closed form: the market is cleared, the firm sells q = K [p* - p_i]+, and
/// revenue is p* q - q^2 / (2K).
UtilityBreakdown restricted_utility_breakdown(double own_breakpoint,
                                              std::span<const double> other_breakpoints,
                                              double slope_k, const Demand& demand,
                                              const Firm& firm);

double restricted_utility(double own_breakpoint, std::span<const double> other_breakpoints,
                          double slope_k, const Demand& demand, const Firm& firm);

/// Clearing price, per-firm quantities and utilities for a full breakpoint
/// profile of the scenario's firms.
MarketOutcome evaluate_profile(std::span<const double> breakpoints, const Scenario& scenario);

}  // namespace pab
