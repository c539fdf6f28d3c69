#pragma once

#include "spg/types.hpp"

namespace spg {

// Stacked pseudo-gradient col(grad_{x^i} J^i) of the follower game, evaluated
// blockwise as P x^i + Q sigma(x^-i) + r_i + S_i pi.
Vec pseudo_gradient(const PricingGame& game, const JointStrategy& x,
                    const Vec& pi);

// Linear part of the pseudo-gradient, F(x, pi) = F1 x + const(pi):
//   F1 = I_N (x) (P - Q) + 1_N 1_N' (x) Q
// Symmetric positive definite whenever the cost assumptions hold; its extreme
// eigenvalues drive the contraction step size.
struct F1Info {
  Mat F1;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};
// Throws MonotonicityError when lambda_min <= 0.
F1Info assemble_F1(const PricingGame& game);

struct LeaderEval {
  double value = 0.0;
  Vec d_pi;                // partial in pi (indirect equilibrium term excluded)
  std::vector<Vec> d_x;    // partial in x^i, one per follower
};
LeaderEval leader_value_and_partials(const PricingGame& game,
                                     const JointStrategy& x, const Vec& pi);

}  // namespace spg
