#include "pab/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pab/payoff.hpp"

namespace pab {

namespace {

// Market regime while the responder sells: `active_opponents` cheapest
// opponents sell too, and the clearing price is alpha + beta * x as a
// function of the responder's breakpoint x in [x_lower, x_upper].
struct Regime {
  std::size_t active_opponents = 0;
  double x_lower = 0.0;
  double x_upper = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct RegimeSet {
  std::vector<Regime> regimes;
  double opponents_only_price = 0.0;  // clearing price when the responder offers nothing
};

void check_inputs(std::span<const double> others, double slope_k, const Demand& demand,
                  const Firm& firm) {
  if (!std::isfinite(slope_k) || slope_k <= 0.0) {
    throw DomainError("offer slope must be positive");
  }
  if (!std::isfinite(firm.cost_coeff) || firm.cost_coeff < 0.0) {
    throw DomainError("firm cost coefficient must be nonnegative");
  }
  for (double b : others) {
    if (!std::isfinite(b) || b < 0.0 || b > demand.price_cap()) {
      throw DomainError("opponent breakpoint " + std::to_string(b) + " outside [0, cap]");
    }
  }
}

RegimeSet build_regimes(std::span<const double> others, double slope_k, const Demand& demand) {
  const double cap = demand.price_cap();
  RegimeSet out;
  out.opponents_only_price =
      others.empty() ? cap : clear_market_kinked(others, slope_k, demand);

  std::vector<double> sorted(others.begin(), others.end());
  std::sort(sorted.begin(), sorted.end());

  const double gamma = demand.slope();
  double prefix = 0.0;
  for (std::size_t m = 0; m <= sorted.size(); ++m) {
    // Clearing price window of the regime with m opponents selling.
    const double window_lo = (m == 0) ? 0.0 : sorted[m - 1];
    const double window_hi =
        (m == sorted.size()) ? out.opponents_only_price
                             : std::min(sorted[m], out.opponents_only_price);
    if (window_lo < window_hi || (m == sorted.size() && window_lo <= window_hi)) {
      const double denom = gamma + slope_k * static_cast<double>(m + 1);
      Regime r;
      r.active_opponents = m;
      r.beta = slope_k / denom;
      r.alpha = (gamma * cap + slope_k * prefix) / denom;
      // Invert p* = alpha + beta x at the window bounds.
      const double x_lo = (window_lo * denom - gamma * cap - slope_k * prefix) / slope_k;
      const double x_hi = (window_hi * denom - gamma * cap - slope_k * prefix) / slope_k;
      r.x_lower = std::max(0.0, x_lo);
      r.x_upper = std::min(cap, x_hi);
      if (r.x_lower <= r.x_upper) {
        out.regimes.push_back(r);
      }
    }
    if (m < sorted.size()) {
      prefix += sorted[m];
    }
  }
  return out;
}

// Prefer the larger breakpoint on exact utility ties (zero-sale plateaus).
bool improves(double u, double x, double best_u, double best_x) {
  return u > best_u || (u == best_u && x > best_x);
}

double golden_section_max(const auto& f, double lo, double hi, double width_tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 200 && (hi - lo) > width_tol; ++iter) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BestResponseResult best_response(std::span<const double> others, double slope_k,
                                 const Demand& demand, const Firm& firm) {
  check_inputs(others, slope_k, demand, firm);
  const double cap = demand.price_cap();
  const auto utility = [&](double x) {
    return restricted_utility(x, others, slope_k, demand, firm);
  };

  const RegimeSet set = build_regimes(others, slope_k, demand);

  BestResponseResult result;
  result.best_breakpoint = cap;
  result.best_utility = utility(cap);

  // lam collects both quadratic penalties on the sold quantity:
  // q^2/(2K) + c q^2 with q = K (p* - x).
  const double lam = slope_k / 2.0 + firm.cost_coeff * slope_k * slope_k;
  for (const Regime& r : set.regimes) {
    BreakpointSegment seg;
    seg.active_count = r.active_opponents + 1;
    seg.lower = r.x_lower;
    seg.upper = r.x_upper;

    const double one_minus_beta = 1.0 - r.beta;
    const double quad = -slope_k * r.beta * one_minus_beta - lam * one_minus_beta * one_minus_beta;
    const double lin =
        slope_k * r.alpha * (2.0 * r.beta - 1.0) + 2.0 * lam * r.alpha * one_minus_beta;

    double seg_best_x = r.x_lower;
    double seg_best_u = utility(r.x_lower);
    const auto consider = [&](double x) {
      const double u = utility(x);
      if (improves(u, x, seg_best_u, seg_best_x)) {
        seg_best_u = u;
        seg_best_x = x;
      }
    };
    consider(r.x_upper);
    if (quad < 0.0) {
      consider(std::clamp(-lin / (2.0 * quad), r.x_lower, r.x_upper));
    }

    seg.best_breakpoint = seg_best_x;
    seg.best_utility = seg_best_u;
    result.segments.push_back(seg);

    if (improves(seg_best_u, seg_best_x, result.best_utility, result.best_breakpoint)) {
      result.best_utility = seg_best_u;
      result.best_breakpoint = seg_best_x;
    }
  }

  // Zero-sale tail: utility is identically zero past the opponents-only price.
  BreakpointSegment tail;
  tail.active_count = 0;
  for (double b : others) {
    if (b < set.opponents_only_price) {
      ++tail.active_count;
    }
  }
  tail.lower = set.opponents_only_price;
  tail.upper = cap;
  tail.best_breakpoint = cap;
  tail.best_utility = utility(cap);
  result.segments.push_back(tail);

  return result;
}

BestResponseResult best_response_grid_oracle(std::span<const double> others, double slope_k,
                                             const Demand& demand, const Firm& firm,
                                             std::size_t grid_points) {
  check_inputs(others, slope_k, demand, firm);
  if (grid_points < 2) {
    throw DomainError("grid oracle needs at least two points");
  }
  const double cap = demand.price_cap();
  const auto utility = [&](double x) {
    return restricted_utility(x, others, slope_k, demand, firm);
  };

  BestResponseResult result;
  result.best_breakpoint = cap;
  result.best_utility = utility(cap);
  if (cap == 0.0) {
    return result;
  }

  const auto consider = [&](double x) {
    const double u = utility(x);
    if (improves(u, x, result.best_utility, result.best_breakpoint)) {
      result.best_utility = u;
      result.best_breakpoint = x;
    }
  };

  const double step = cap / static_cast<double>(grid_points - 1);
  std::vector<double> centers;
  for (std::size_t i = 0; i < grid_points; ++i) {
    consider(std::min(static_cast<double>(i) * step, cap));
  }
  for (const Regime& r : build_regimes(others, slope_k, demand).regimes) {
    consider(r.x_lower);
    consider(r.x_upper);
    centers.push_back(r.x_lower);
    centers.push_back(r.x_upper);
  }

  // Refine one grid cell around the best point and around every regime knot;
  // profitable slivers can hug a knot more tightly than the grid resolves.
  // Brackets are split at the center so each side is unimodal.
  centers.push_back(result.best_breakpoint);
  for (double center : centers) {
    const double lo = std::max(0.0, center - step);
    const double hi = std::min(cap, center + step);
    if (lo < center) {
      consider(golden_section_max(utility, lo, center, 1e-12 * cap));
    }
    if (center < hi) {
      consider(golden_section_max(utility, center, hi, 1e-12 * cap));
    }
  }

  return result;
}

}  // namespace pab
