#include "pab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pab/payoff.hpp"

namespace pab {

namespace {

constexpr std::size_t kTransformExtraNodes = 64;

void check_firm_index(const Scenario& scenario, std::size_t firm_index) {
  if (firm_index >= scenario.firm_count()) {
    throw DomainError("firm index " + std::to_string(firm_index) + " out of range");
  }
}

void check_quadruple(const Scenario& scenario, const OrderedQuadruple& q) {
  const std::size_t expected = scenario.firm_count() - 1;
  if (q.others_low.size() != expected || q.others_high.size() != expected) {
    throw DomainError("quadruple opponent vectors must have one entry per opponent");
  }
  if (!(q.own_low <= q.own_high)) {
    throw DomainError("quadruple order violated: own_low > own_high");
  }
  for (std::size_t j = 0; j < expected; ++j) {
    if (!(q.others_low[j] <= q.others_high[j])) {
      throw DomainError("quadruple order violated in opponent coordinate " + std::to_string(j));
    }
  }
}

}  // namespace

SupplyCurve dominance_transform(const SupplyCurve& supply, double clearing_price) {
  const double cap = supply.price_cap();
  if (!(clearing_price > 0.0) || !leq_with_slack(clearing_price, cap)) {
    throw DomainError("dominance transform needs a clearing price in (0, price cap]");
  }
  const double p_star = std::min(clearing_price, cap);

  // Node grid: preimages sqrt(x * p*) of the original node prices keep the
  // composed curve piecewise-smooth between nodes; extra uniform nodes on
  // [0, p*] keep the integral comparison sharp.
  std::set<double> prices{0.0, p_star, cap};
  for (const CurveNode& n : supply.nodes()) {
    const double preimage = std::sqrt(n.price * p_star);
    if (preimage > 0.0 && preimage < cap) {
      prices.insert(preimage);
    }
  }
  for (std::size_t i = 1; i < kTransformExtraNodes; ++i) {
    const double p = p_star * static_cast<double>(i) / kTransformExtraNodes;
    if (p > 0.0 && p < cap) {
      prices.insert(p);
    }
  }

  std::vector<CurveNode> nodes;
  nodes.reserve(prices.size());
  const double merge_eps = 1e-12 * std::max(1.0, cap);
  double prev_quantity = 0.0;
  for (double p : prices) {
    const bool anchor = p == 0.0 || p == p_star || p == cap;
    if (!anchor && !nodes.empty() && p - nodes.back().price < merge_eps) {
      continue;  // merge near-duplicate grid points, keeping the anchors
    }
    double value;
    if (p == 0.0) {
      value = 0.0;
    } else if (p == p_star) {
      value = supply.value_at(p_star);  // exact by construction
    } else {
      value = std::max(supply.value_at(std::min(p * p / p_star, cap)),
                       prev_quantity);  // squash last-ulp dips from rounding
    }
    nodes.push_back({p, value});
    prev_quantity = value;
  }
  return SupplyCurve(std::move(nodes));
}

KinkedOffer kink_improvement(const SupplyCurve& supply, double clearing_price, double slope_k) {
  if (!(slope_k > 0.0) || !std::isfinite(slope_k)) {
    throw DomainError("offer slope must be positive");
  }
  if (!supply.is_lipschitz(slope_k)) {
    throw ValidationError("supply curve exceeds the Lipschitz bound " + std::to_string(slope_k));
  }
  const double cap = supply.price_cap();
  if (!(clearing_price > 0.0) || !leq_with_slack(clearing_price, cap)) {
    throw DomainError("kink matching needs a clearing price in (0, price cap]");
  }
  const double p_star = std::min(clearing_price, cap);
  const double sold = supply.value_at(p_star);
  return KinkedOffer{std::max(0.0, p_star - sold / slope_k), slope_k};
}

IncreasingDifferencesReport increasing_differences_check(const Scenario& scenario,
                                                         std::size_t firm_index,
                                                         std::span<const OrderedQuadruple> sample) {
  check_firm_index(scenario, firm_index);
  const Firm& firm = scenario.firms()[firm_index];
  const double k = scenario.lipschitz_k();

  IncreasingDifferencesReport report;
  report.tested_quadruples = sample.size();
  for (const OrderedQuadruple& q : sample) {
    check_quadruple(scenario, q);
    const auto u = [&](double own, const std::vector<double>& others) {
      return restricted_utility(own, others, k, scenario.demand(), firm);
    };
    const double lhs = u(q.own_high, q.others_high) - u(q.own_low, q.others_high);
    const double rhs = u(q.own_high, q.others_low) - u(q.own_low, q.others_low);
    if (lhs < rhs - 1e-9) {
      report.violations.push_back({q, lhs, rhs});
    }
  }
  report.is_supermodular_on_sample = report.violations.empty();
  return report;
}

std::vector<OrderedQuadruple> random_quadruples(const Scenario& scenario, std::size_t firm_index,
                                                std::size_t count, std::uint64_t seed) {
  check_firm_index(scenario, firm_index);
  const double cap = scenario.demand().price_cap();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, cap);

  std::vector<OrderedQuadruple> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    OrderedQuadruple q;
    double a = uniform(rng);
    double b = uniform(rng);
    q.own_low = std::min(a, b);
    q.own_high = std::max(a, b);
    for (std::size_t j = 0; j + 1 < scenario.firm_count(); ++j) {
      a = uniform(rng);
      b = uniform(rng);
      q.others_low.push_back(std::min(a, b));
      q.others_high.push_back(std::max(a, b));
    }
    out.push_back(std::move(q));
  }
  return out;
}

bool constant_active_regime(const Scenario& scenario, std::size_t firm_index,
                            const OrderedQuadruple& quadruple) {
  check_firm_index(scenario, firm_index);
  check_quadruple(scenario, quadruple);
  const double k = scenario.lipschitz_k();

  std::size_t sellers = 0;
  bool first = true;
  for (bool own_high : {false, true}) {
    for (bool others_high : {false, true}) {
      const double own = own_high ? quadruple.own_high : quadruple.own_low;
      const auto& others = others_high ? quadruple.others_high : quadruple.others_low;

      std::vector<double> profile(others.begin(), others.end());
      profile.push_back(own);
      const double p_star = clear_market_kinked(profile, k, scenario.demand());
      if (!(own < p_star)) {
        return false;  // the firm must sell at every corner
      }
      std::size_t active = 0;
      for (double b : profile) {
        if (b < p_star) {
          ++active;
        }
      }
      if (first) {
        sellers = active;
        first = false;
      } else if (active != sellers) {
        return false;
      }
    }
  }
  return true;
}

std::vector<KSweepRow> k_sweep(const Scenario& base_scenario, std::span<const double> k_values,
                               const SolverOptions& options) {
  if (k_values.empty()) {
    throw ValidationError("sweep needs at least one slope bound");
  }
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (!(k_values[i] > 0.0) || !std::isfinite(k_values[i])) {
      throw ValidationError("sweep slope bounds must be positive");
    }
    for (std::size_t j = i + 1; j < k_values.size(); ++j) {
      if (k_values[i] == k_values[j]) {
        throw ValidationError("sweep slope bounds must be distinct");
      }
    }
  }

  std::vector<KSweepRow> rows;
  rows.reserve(k_values.size());
  for (double k : k_values) {
    const EquilibriumResult eq = find_equilibrium(base_scenario.with_lipschitz_k(k), options);
    rows.push_back({k, eq.breakpoints, eq.clearing_price, eq.utilities, eq.converged,
                    eq.iterations});
  }
  return rows;
}

SupplyCurve random_lipschitz_curve(std::mt19937_64& rng, double price_cap, double slope_k,
                                   std::size_t segments) {
  if (!(price_cap > 0.0) || !(slope_k > 0.0) || segments == 0) {
    throw DomainError("random curve needs positive cap, slope bound and segment count");
  }
  std::uniform_real_distribution<double> price_dist(0.0, price_cap);
  std::uniform_real_distribution<double> slope_dist(0.0, slope_k);

  std::set<double> cuts{0.0, price_cap};
  while (cuts.size() < segments + 1) {
    const double p = price_dist(rng);
    if (p > 0.0 && p < price_cap) {
      cuts.insert(p);
    }
  }

  std::vector<CurveNode> nodes;
  nodes.reserve(cuts.size());
  double quantity = 0.0;
  double prev = 0.0;
  for (double p : cuts) {
    if (p > 0.0) {
      quantity += slope_dist(rng) * (p - prev);
    }
    nodes.push_back({p, quantity});
    prev = p;
  }
  return SupplyCurve(std::move(nodes));
}

}  // namespace pab
