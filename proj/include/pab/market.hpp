#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pab/errors.hpp"

namespace pab {

// Slack used when validating monotonicity and Lipschitz bounds of curves, so
// that serialization round trips do not get rejected over last-ulp noise.
inline constexpr double kCurveSlack = 1e-12;

inline bool leq_with_slack(double a, double b, double slack = kCurveSlack) {
  return a <= b + slack * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Linear demand D(p) = N - gamma * p on [0, price_cap], price_cap = N / gamma.
class Demand {
 public:
  Demand(double intercept, double slope);

  double intercept() const { return intercept_; }
  double slope() const { return slope_; }
  double price_cap() const { return price_cap_; }

  // Evaluated as slope * (price_cap - price) so the cap maps to exactly zero.
  double at(double price) const { return slope_ * (price_cap_ - price); }

 private:
  double intercept_;
  double slope_;
  double price_cap_;
};

/// Producer with quadratic cost C(q) = cost_coeff * q^2.
struct Firm {
  double cost_coeff = 0.0;

  double cost(double quantity) const { return cost_coeff * quantity * quantity; }
};

/// One-parameter offer S(p) = slope * max(p - breakpoint, 0).
struct KinkedOffer {
  double breakpoint = 0.0;
  double slope = 0.0;

  double at(double price) const {
    const double d = price - breakpoint;
    return d > 0.0 ? slope * d : 0.0;
  }
};

struct CurveNode {
  double price = 0.0;
  double quantity = 0.0;
};

/// Non-decreasing piecewise-linear supply curve anchored at (0, 0). Node
/// prices are strictly increasing; the last node sits at the price cap the
/// curve was built for. Values between nodes interpolate linearly.
class SupplyCurve {
 public:
  explicit SupplyCurve(std::vector<CurveNode> nodes);

  static SupplyCurve from_kinked(const KinkedOffer& offer, double price_cap);

  const std::vector<CurveNode>& nodes() const { return nodes_; }
  double price_cap() const { return nodes_.back().price; }

  double value_at(double price) const;

  /// Exact integral of the curve over [0, price].
  double integral_to(double price) const;

  double max_chord_slope() const;
  bool is_lipschitz(double slope_k) const;

 private:
  std::vector<CurveNode> nodes_;
};

struct MarketOutcome {
  double clearing_price = 0.0;
  std::vector<double> quantities;
  std::vector<double> utilities;
};

/// Demand, firms and the common slope bound, bundled for I/O and solvers.
class Scenario {
 public:
  Scenario(Demand demand, std::vector<Firm> firms, double lipschitz_k);

  const Demand& demand() const { return demand_; }
  const std::vector<Firm>& firms() const { return firms_; }
  double lipschitz_k() const { return lipschitz_k_; }
  std::size_t firm_count() const { return firms_.size(); }

  Scenario with_lipschitz_k(double k) const { return {demand_, firms_, k}; }

 private:
  Demand demand_;
  std::vector<Firm> firms_;
  double lipschitz_k_;
};

/// Candidate clearing price of one active-set segment. For valid inputs
/// exactly one segment is consistent (the aggregate excess is strictly
/// decreasing in price).
struct SegmentSolution {
  std::size_t active_count = 0;
  double segment_lower = 0.0;
  double segment_upper = 0.0;
  double price = 0.0;
};

/// Unique price where demand meets the aggregate of kinked offers with common
/// slope `slope_k`. Closed form, no iteration: scans active-set segments in
/// breakpoint order and solves the single consistent one.
double clear_market_kinked(std::span<const double> breakpoints, double slope_k,
                           const Demand& demand);

/// All segment-consistent candidates, for diagnostics and uniqueness audits.
std::vector<SegmentSolution> kinked_segment_solutions(std::span<const double> breakpoints,
                                                      double slope_k, const Demand& demand);

/// Unique root of D(p) - sum_i S_i(p) on [0, price_cap], by bisection to
/// absolute price tolerance 1e-10 (at most 200 halvings).
double clear_market_general(std::span<const SupplyCurve> supplies, const Demand& demand);

}  // namespace pab
