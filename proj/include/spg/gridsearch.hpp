#pragma once

#include <vector>

#include "spg/nash.hpp"
#include "spg/types.hpp"

namespace spg {

struct GridEntry {
  Vec pi;
  double value = 0.0;
};

struct GridResult {
  std::vector<GridEntry> ranked;  // ascending leader value
  long total_points = 0;
  const GridEntry& best() const { return ranked.front(); }
};

// Evaluates J^L(x*(pi), pi) on the uniform grid with points_per_axis points
// per coordinate (endpoints included; a single point means the box midpoint)
// and returns all evaluations ranked. Refuses grids beyond 1e6 points before
// doing any work.
GridResult grid_search(const PricingGame& game, int points_per_axis,
                       const NashConfig& nash_cfg = {});

}  // namespace spg
