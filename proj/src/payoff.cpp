#include "pab/payoff.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace pab {

UtilityBreakdown pab_utility_general(const SupplyCurve& supply, double clearing_price,
                                     const Firm& firm) {
  if (!(clearing_price >= 0.0) || !leq_with_slack(clearing_price, supply.price_cap())) {
    throw DomainError("clearing price " + std::to_string(clearing_price) +
                      " outside [0, price cap]");
  }
  const double p = std::min(clearing_price, supply.price_cap());
  const double sold = supply.value_at(p);
  UtilityBreakdown out;
  out.revenue = p * sold - supply.integral_to(p);
  out.cost = firm.cost(sold);
  out.utility = out.revenue - out.cost;
  return out;
}

UtilityBreakdown restricted_utility_breakdown(double own_breakpoint,
                                              std::span<const double> other_breakpoints,
                                              double slope_k, const Demand& demand,
                                              const Firm& firm) {
  std::vector<double> all(other_breakpoints.begin(), other_breakpoints.end());
  all.push_back(own_breakpoint);
  const double p_star = clear_market_kinked(all, slope_k, demand);

  const double margin = p_star - own_breakpoint;
  const double sold = margin > 0.0 ? slope_k * margin : 0.0;
  UtilityBreakdown out;
  out.revenue = p_star * sold - sold * sold / (2.0 * slope_k);
  out.cost = firm.cost(sold);
  out.utility = out.revenue - out.cost;
  return out;
}

double restricted_utility(double own_breakpoint, std::span<const double> other_breakpoints,
                          double slope_k, const Demand& demand, const Firm& firm) {
  return restricted_utility_breakdown(own_breakpoint, other_breakpoints, slope_k, demand, firm)
      .utility;
}

MarketOutcome evaluate_profile(std::span<const double> breakpoints, const Scenario& scenario) {
  if (breakpoints.size() != scenario.firm_count()) {
    throw DomainError("breakpoint count does not match the number of firms");
  }
  const double k = scenario.lipschitz_k();
  MarketOutcome out;
  out.clearing_price = clear_market_kinked(breakpoints, k, scenario.demand());
  out.quantities.reserve(breakpoints.size());
  out.utilities.reserve(breakpoints.size());
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double margin = out.clearing_price - breakpoints[i];
    const double sold = margin > 0.0 ? k * margin : 0.0;
    out.quantities.push_back(sold);
    out.utilities.push_back(out.clearing_price * sold - sold * sold / (2.0 * k) -
                            scenario.firms()[i].cost(sold));
  }
  return out;
}

}  // namespace pab
