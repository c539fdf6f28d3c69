#include "spg/scenario.hpp"

#include <memory>
#include <string>

#include "spg/errors.hpp"
#include "spg/validation.hpp"

namespace spg {

namespace {

void require_len(const Vec& v, int m, const std::string& name) {
  if (v.size() != m)
    throw DimensionError(name + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(m));
}

}  // namespace

PricingGame build_game_from_scenario(const ChargingScenario& s) {
  const int m = s.num_stations();
  if (m == 0) throw DimensionError("scenario has no stations");
  if (s.companies.empty()) throw DimensionError("scenario has no companies");
  require_len(s.queue_weight, m, "queue_weight");
  require_len(s.price_lo, m, "price_lo");
  require_len(s.price_hi, m, "price_hi");
  require_len(s.n_des, m, "n_des");

  for (int j = 0; j < m; ++j)
    if (!(s.queue_weight(j) > 0.0))
      throw MonotonicityError(
          "queue_weight(" + std::to_string(j) + ") = " +
          std::to_string(s.queue_weight(j)) +
          " must be positive; the induced game would not be strictly "
          "monotone");

  const Mat Dq = s.queue_weight.asDiagonal();
  PricingGame game;
  game.price_lo = s.price_lo;
  game.price_hi = s.price_hi;
  game.objective = std::make_shared<TrackingObjective>(s.n_des);

  for (size_t i = 0; i < s.companies.size(); ++i) {
    const auto& c = s.companies[i];
    const std::string who = "companies[" + std::to_string(i) + "]";
    if (!(c.fleet > 0.0))
      throw Error(who + ".fleet must be positive, got " +
                  std::to_string(c.fleet));
    require_len(c.charge_demand, m, who + ".charge_demand");
    require_len(c.e_arr, m, who + ".e_arr");
    require_len(c.e_pro, m, who + ".e_pro");
    if (c.reach_G.rows() != c.reach_h.size())
      throw DimensionError(who + ".reach_G and .reach_h disagree on rows");
    if (c.reach_G.rows() > 0 && c.reach_G.cols() != m)
      throw DimensionError(who + ".reach_G must have one column per station");

    FollowerSpec f;
    f.P = 2.0 * Dq;
    f.Q = Dq;
    f.r = -Dq * s.capacity + c.e_arr - c.e_pro;
    f.S = c.charge_demand.asDiagonal();
    f.A = Mat::Ones(1, m);
    f.b = Vec::Constant(1, c.fleet);
    const int extra = static_cast<int>(c.reach_G.rows());
    f.G = Mat(m + extra, m);
    f.G.topRows(m) = -Mat::Identity(m, m);
    if (extra > 0) f.G.bottomRows(extra) = c.reach_G;
    f.h = Vec::Zero(m + extra);
    if (extra > 0) f.h.tail(extra) = c.reach_h;
    game.followers.push_back(std::move(f));
  }

  const ValidationReport report = validate_game(game);
  if (!report.ok()) {
    std::string failing;
    bool feasibility = false;
    for (const auto& chk : report.checks) {
      if (chk.pass) continue;
      if (!failing.empty()) failing += "; ";
      failing += chk.name + ": " + chk.detail;
      if (chk.name.find("feasible") != std::string::npos ||
          chk.name.find("slater") != std::string::npos)
        feasibility = true;
    }
    if (feasibility)
      throw InfeasibleError(
          "scenario maps to an infeasible fleet split: " + failing);
    throw Error("scenario maps to an invalid game: " + failing);
  }
  return game;
}

}  // namespace spg
