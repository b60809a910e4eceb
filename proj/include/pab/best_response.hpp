#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pab/market.hpp"

namespace pab {

/// Own-breakpoint interval on which the set of selling firms is fixed, with
/// the restricted-utility optimum inside it. Kept for audit output.
struct BreakpointSegment {
  std::size_t active_count = 0;  // firms selling in the regime
  double lower = 0.0;
  double upper = 0.0;
  double best_breakpoint = 0.0;
  double best_utility = 0.0;
};

struct BestResponseResult {
  double best_breakpoint = 0.0;
  double best_utility = 0.0;
  std::vector<BreakpointSegment> segments;
};

/// Global maximizer of the restricted utility over own breakpoints in
/// [0, price cap], against fixed kinked opponents. On each active-set segment
/// the utility is a concave quadratic of the breakpoint; the maximum is taken
/// across segment vertices and endpoints. Ties go to the largest breakpoint.
BestResponseResult best_response(std::span<const double> other_breakpoints, double slope_k,
                                 const Demand& demand, const Firm& firm);

/// Brute-force verifier: evaluates the restricted utility on a uniform grid
/// (plus all segment endpoints) and refines around the best point by
/// golden-section search.
BestResponseResult best_response_grid_oracle(std::span<const double> other_breakpoints,
                                             double slope_k, const Demand& demand,
                                             const Firm& firm, std::size_t grid_points);

}  // namespace pab
