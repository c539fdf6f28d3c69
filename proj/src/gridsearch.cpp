#include "spg/gridsearch.hpp"

#include <algorithm>
#include <cmath>

#include "spg/errors.hpp"

namespace spg {

GridResult grid_search(const PricingGame& game, int points_per_axis,
                       const NashConfig& nash_cfg) {
  check_dimensions(game);
  if (points_per_axis < 1)
    throw Error("points_per_axis must be at least 1, got " +
                std::to_string(points_per_axis));
  const int mL = game.price_dim();
  constexpr long kBudget = 1'000'000;
  double total_d = 1.0;
  for (int k = 0; k < mL; ++k) total_d *= points_per_axis;
  if (total_d > static_cast<double>(kBudget))
    throw Error("grid of " + std::to_string(points_per_axis) + "^" +
                std::to_string(mL) +
                " points exceeds the evaluation budget of 1000000");
  const long total = static_cast<long>(total_d);

  GridResult out;
  out.total_points = total;
  out.ranked.reserve(static_cast<size_t>(total));

  std::vector<int> idx(static_cast<size_t>(mL), 0);
  std::optional<JointStrategy> warm;
  for (long n = 0; n < total; ++n) {
    Vec pi(mL);
    for (int k = 0; k < mL; ++k) {
      const double lo = game.price_lo(k);
      const double hi = game.price_hi(k);
      pi(k) = points_per_axis == 1
                  ? 0.5 * (lo + hi)
                  : lo + idx[static_cast<size_t>(k)] * (hi - lo) /
                            (points_per_axis - 1);
    }
    const NashResult nash = solve_nash(game, pi, nash_cfg, warm);
    warm = nash.x;
    out.ranked.push_back({pi, game.objective->value(nash.x, pi)});

    for (int k = mL - 1; k >= 0; --k) {
      if (++idx[static_cast<size_t>(k)] < points_per_axis) break;
      idx[static_cast<size_t>(k)] = 0;
    }
  }

  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const GridEntry& a, const GridEntry& b) {
                     return a.value < b.value;
                   });
  return out;
}

}  // namespace spg
