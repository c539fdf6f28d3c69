#pragma once

#include <vector>

#include "spg/types.hpp"

namespace spg {

// EV-charging price-design instance: companies split their fleets across
// charging stations, the operator prices energy per station.
struct ChargingScenario {
  Vec capacity;      // vehicles each station can serve (M)
  Vec queue_weight;  // queueing cost per squared vehicle (q), > 0
  Vec price_lo;      // leader's box, one price per station
  Vec price_hi;
  Vec n_des;         // operator's desired occupancy per station

  struct Company {
    double fleet = 0.0;  // N_i, vehicles to allocate
    Vec charge_demand;   // expected kWh per vehicle per station (diag of S)
    Vec e_arr;           // travel cost per vehicle per station
    Vec e_pro;           // expected profit per vehicle per station
    Mat reach_G;         // extra allocation inequalities (e.g. reachability)
    Vec reach_h;
  };
  std::vector<Company> companies;

  int num_stations() const { return static_cast<int>(capacity.size()); }
};

// Maps the scenario onto the quadratic aggregative game: queueing at station
// j costs q_j * x_j * (x_j + sigma_j - M_j), so P = 2*Dg(q), Q = Dg(q),
// r_i = -Dg(q) M + e_arr - e_pro; fleets are conserved (1'x = N_i) and
// allocations are nonnegative. The result is fully validated.
PricingGame build_game_from_scenario(const ChargingScenario& s);

}  // namespace spg
