#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spg/types.hpp"

namespace spg {

struct NashConfig {
  // Step size of the fixed-point map x -> Pi_X[x - gamma F(x, pi)]. When
  // absent it is chosen as 2 / (lambda_min + lambda_max) of F1, which is the
  // optimal contraction factor for the symmetric affine part. A user-supplied
  // gamma is validated against ||I - gamma F1||_2 < 1.
  std::optional<double> gamma;
  double eps = 1e-8;              // stop when ||x_{k+1} - x_k|| <= eps
  std::optional<int> max_iter;    // absent: bound from the contraction factor
};

struct ContractionParams {
  double gamma = 0.0;
  double q = 0.0;  // contraction factor, < 1
};
ContractionParams contraction_params(const PricingGame& game);

struct NashResult {
  JointStrategy x;
  int iterations = 0;
  double residual = 0.0;
  std::vector<Vec> proj_eq_duals;    // projection-QP duals at the last sweep
  std::vector<Vec> proj_ineq_duals;
  std::vector<double> residual_history;
  std::vector<std::string> warnings;
};

// Picard-Banach iteration for the unique equilibrium of the follower game at
// price pi. All follower blocks update from the same x_k (Jacobi sweep).
NashResult solve_nash(const PricingGame& game, const Vec& pi,
                      const NashConfig& cfg = {},
                      const std::optional<JointStrategy>& x0 = {});

struct BestResponse {
  Vec x;
  Vec ineq_duals;  // lambda, zero on inactive rows
  Vec eq_duals;    // nu
  double kkt_residual = 0.0;
};

// Solves min_x 1/2 x'P x + x'Q sigma_others + r'x + x'S pi over the follower's
// polyhedron and returns the optimizer with its multipliers.
BestResponse best_response_qp(const FollowerSpec& follower,
                              const Vec& sigma_others, const Vec& pi,
                              double tol = 1e-9);

struct NashVerification {
  std::vector<double> deviations;  // ||x^i - BR_i|| per follower
  double worst_deviation = 0.0;
  int worst_follower = -1;
  bool within(double tol) const { return worst_deviation <= tol; }
};

// Certifies a candidate equilibrium against per-follower best responses.
NashVerification verify_nash(const PricingGame& game, const JointStrategy& x,
                             const Vec& pi);

}  // namespace spg
