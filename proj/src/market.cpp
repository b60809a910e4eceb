#include "pab/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pab {

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_breakpoints(std::span<const double> breakpoints, double slope_k,
                       const Demand& demand) {
  if (breakpoints.empty()) {
    throw DomainError("market clearing needs at least one offer");
  }
  if (!finite(slope_k) || slope_k <= 0.0) {
    throw DomainError("offer slope must be positive, got " + std::to_string(slope_k));
  }
  for (double b : breakpoints) {
    if (!finite(b) || b < 0.0 || b > demand.price_cap()) {
      throw DomainError("breakpoint " + std::to_string(b) + " outside [0, " +
                        std::to_string(demand.price_cap()) + "]");
    }
  }
}

}  // namespace

Demand::Demand(double intercept, double slope)
    : intercept_(intercept), slope_(slope), price_cap_(intercept / slope) {
  if (!finite(intercept) || intercept < 0.0) {
    throw ValidationError("demand intercept must be nonnegative");
  }
  if (!finite(slope) || slope <= 0.0) {
    throw ValidationError("demand slope must be positive");
  }
}

SupplyCurve::SupplyCurve(std::vector<CurveNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) {
    throw ValidationError("supply curve needs at least one node");
  }
  if (nodes_.front().price != 0.0 || nodes_.front().quantity != 0.0) {
    throw ValidationError("supply curve must start at (0, 0)");
  }
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (!(nodes_[i].price < nodes_[i + 1].price)) {
      throw ValidationError("supply curve node prices must be strictly increasing");
    }
    if (!leq_with_slack(nodes_[i].quantity, nodes_[i + 1].quantity)) {
      throw ValidationError("supply curve quantities must be non-decreasing");
    }
  }
  for (const CurveNode& n : nodes_) {
    if (!finite(n.price) || !finite(n.quantity)) {
      throw ValidationError("supply curve nodes must be finite");
    }
  }
}

SupplyCurve SupplyCurve::from_kinked(const KinkedOffer& offer, double price_cap) {
  if (!finite(price_cap) || price_cap < 0.0) {
    throw DomainError("price cap must be nonnegative");
  }
  if (offer.breakpoint < 0.0 || offer.breakpoint > price_cap) {
    throw DomainError("kinked offer breakpoint outside [0, price cap]");
  }
  std::vector<CurveNode> nodes;
  nodes.push_back({0.0, 0.0});
  if (offer.breakpoint > 0.0 && offer.breakpoint < price_cap) {
    nodes.push_back({offer.breakpoint, 0.0});
  }
  if (price_cap > 0.0) {
    nodes.push_back({price_cap, offer.at(price_cap)});
  }
  return SupplyCurve(std::move(nodes));
}

double SupplyCurve::value_at(double price) const {
  const double cap = nodes_.back().price;
  if (!finite(price) || price < 0.0 || !leq_with_slack(price, cap)) {
    throw DomainError("price " + std::to_string(price) + " outside curve domain [0, " +
                      std::to_string(cap) + "]");
  }
  price = std::min(price, cap);
  // First node with price >= the query; exact hits return the node quantity.
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), price,
                             [](const CurveNode& n, double p) { return n.price < p; });
  if (it->price == price) {
    return it->quantity;
  }
  const CurveNode& hi = *it;
  const CurveNode& lo = *(it - 1);
  const double t = (price - lo.price) / (hi.price - lo.price);
  return lo.quantity + t * (hi.quantity - lo.quantity);
}

double SupplyCurve::integral_to(double price) const {
  const double cap = nodes_.back().price;
  if (!finite(price) || price < 0.0 || !leq_with_slack(price, cap)) {
    throw DomainError("integration bound outside curve domain");
  }
  price = std::min(price, cap);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const CurveNode& a = nodes_[i];
    const CurveNode& b = nodes_[i + 1];
    if (price <= a.price) {
      break;
    }
    if (price >= b.price) {
      total += 0.5 * (a.quantity + b.quantity) * (b.price - a.price);
    } else {
      const double v = a.quantity + (price - a.price) / (b.price - a.price) *
                                        (b.quantity - a.quantity);
      total += 0.5 * (a.quantity + v) * (price - a.price);
      break;
    }
  }
  return total;
}

double SupplyCurve::max_chord_slope() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const double slope = (nodes_[i + 1].quantity - nodes_[i].quantity) /
                         (nodes_[i + 1].price - nodes_[i].price);
    worst = std::max(worst, slope);
  }
  return worst;
}

bool SupplyCurve::is_lipschitz(double slope_k) const {
  return leq_with_slack(max_chord_slope(), slope_k);
}

Scenario::Scenario(Demand demand, std::vector<Firm> firms, double lipschitz_k)
    : demand_(demand), firms_(std::move(firms)), lipschitz_k_(lipschitz_k) {
  if (firms_.empty()) {
    throw ValidationError("scenario needs at least one firm");
  }
  if (!finite(lipschitz_k) || lipschitz_k <= 0.0) {
    throw ValidationError("scenario slope bound K must be positive");
  }
  for (const Firm& f : firms_) {
    if (!finite(f.cost_coeff) || f.cost_coeff < 0.0) {
      throw ValidationError("firm cost coefficient must be nonnegative");
    }
  }
}

double clear_market_kinked(std::span<const double> breakpoints, double slope_k,
                           const Demand& demand) {
  check_breakpoints(breakpoints, slope_k, demand);
  const double cap = demand.price_cap();

  std::vector<double> sorted(breakpoints.begin(), breakpoints.end());
  std::sort(sorted.begin(), sorted.end());

  if (sorted.front() >= cap) {
    return cap;  // total supply is identically zero below the cap
  }

  // Excess g(p) = D(p) - K * sum_i [p - b_i]+ is strictly decreasing with
  // g(0) >= 0 >= g(cap). Walk the sorted breakpoints until g goes negative;
  // the root lies in the segment just before, where the active set is fixed
  // and g is affine. Offers with b_i equal to a boundary contribute zero
  // there, so prefix counts need no tie handling.
  double prefix = 0.0;
  std::size_t active = sorted.size();
  double lower = sorted.back();
  double upper = cap;
  double active_prefix = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = sorted[i];
    const double g = demand.at(x) - slope_k * (static_cast<double>(i) * x - prefix);
    if (g < 0.0) {
      active = i;
      active_prefix = prefix;
      lower = (i == 0) ? 0.0 : sorted[i - 1];
      upper = x;
      found = true;
      break;
    }
    prefix += x;
  }
  if (!found) {
    active_prefix = prefix;  // every offer sells at the clearing price
  }

  const double denom = demand.slope() + slope_k * static_cast<double>(active);
  const double root =
      (demand.slope() * cap + slope_k * active_prefix) / denom;
  return std::clamp(root, lower, upper);
}

std::vector<SegmentSolution> kinked_segment_solutions(std::span<const double> breakpoints,
                                                      double slope_k, const Demand& demand) {
  check_breakpoints(breakpoints, slope_k, demand);
  const double cap = demand.price_cap();

  std::vector<double> sorted(breakpoints.begin(), breakpoints.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::vector<SegmentSolution> consistent;
  const double slack = kCurveSlack * std::max(1.0, cap);
  double prefix = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    const double lo = (m == 0) ? 0.0 : sorted[m - 1];
    const double hi = (m == n) ? cap : sorted[m];
    const double denom = demand.slope() + slope_k * static_cast<double>(m);
    const double r = (demand.slope() * cap + slope_k * prefix) / denom;
    const bool inside = (m == n) ? (r >= lo - slack && r <= hi + slack)
                                 : (r >= lo - slack && r < hi);
    if (inside) {
      // Segments sharing a boundary root report the same price; keep one.
      if (consistent.empty() ||
          std::abs(consistent.back().price - r) > 1e-9 * std::max(1.0, cap)) {
        consistent.push_back({m, lo, hi, std::clamp(r, lo, hi)});
      }
    }
    if (m < n) {
      prefix += sorted[m];
    }
  }
  return consistent;
}

double clear_market_general(std::span<const SupplyCurve> supplies, const Demand& demand) {
  if (supplies.empty()) {
    throw DomainError("market clearing needs at least one supply curve");
  }
  const double cap = demand.price_cap();
  for (const SupplyCurve& s : supplies) {
    if (std::abs(s.price_cap() - cap) > 1e-9 * std::max(1.0, cap)) {
      throw ValidationError("supply curve price cap does not match the demand cap");
    }
  }

  const auto excess = [&](double p) {
    double total = 0.0;
    for (const SupplyCurve& s : supplies) {
      total += s.value_at(std::min(p, s.price_cap()));
    }
    return demand.at(p) - total;
  };

  if (excess(cap) >= 0.0) {
    return cap;  // zero aggregate supply at the cap
  }

  double lo = 0.0;
  double hi = cap;
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-10; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pab
