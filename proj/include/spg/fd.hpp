#pragma once

#include "spg/nash.hpp"
#include "spg/sensitivity.hpp"
#include "spg/types.hpp"

namespace spg {

// Central-difference Jacobian of one follower's best response in pi, holding
// sigma(x^-i) frozen. The active set must be identical at every stencil
// point; on a flip the step is retried a decade down and a decade up, and an
// UnreliableStencilError is thrown if no stable step is found.
Mat fd_jacobian(const FollowerSpec& follower, const Vec& sigma_others,
                const Vec& pi, double step = 1e-6);

struct FdGradientReport {
  Vec fd;              // central differences of J^L(x*(pi), pi)
  Vec assembled;       // the sensitivity-based gradient at the center
  double discrepancy = 0.0;  // inf-norm of the difference (diagnostic only)
};

// Finite-difference probe of the leader's objective through full equilibrium
// re-solves. The assembled gradient treats x^{-i} as fixed inside each
// follower Jacobian, so the two columns agree exactly only when that coupling
// term vanishes; the report states both and their gap without judging it.
FdGradientReport fd_total_gradient(const PricingGame& game, const Vec& pi,
                                   double step = 1e-6,
                                   const NashConfig& nash_cfg = {},
                                   const SensitivityConfig& sens_cfg = {});

}  // namespace spg
