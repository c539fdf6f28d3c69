#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spg/nash.hpp"
#include "spg/sensitivity.hpp"
#include "spg/types.hpp"

namespace spg {

struct LeaderConfig {
  double beta = 0.25;   // backtracking factor, in (0,1)
  double s_bar = 1e-6;  // base step size
  double delta = 1e-5;  // sufficient-decrease parameter, in (0,1)
  int max_outer = 500;
  int l_max = 60;  // beta^60 * s_bar is far below machine precision
  // Stationarity threshold on ||pi_t - Pi_P[pi_t - s_bar*grad]||. Absent:
  // 1e-9 * s_bar * ||grad_0||, floored at 1e-14. The projected displacement
  // is used instead of ||grad|| because the gradient need not vanish on the
  // box boundary.
  std::optional<double> stat_tol;
  void check() const;
};

// dJ/dpi = dJ/dpi|_x + sum_i D_pi x^{i*'} dJ/dx^i, holding each x^{-i} fixed
// inside the per-follower Jacobians.
Vec total_gradient(const PricingGame& game, const JointStrategy& x,
                   const std::vector<SensitivityResult>& jacobians,
                   const Vec& pi);

struct ArmijoResult {
  Vec pi_next;
  int l = 0;
  double step = 0.0;
  double J_next = 0.0;
  bool stalled = false;  // no l <= l_max satisfied the decrease condition
};

// Backtracking along the projection arc: accepts the smallest l >= 0 with
// J(pi) - J(pi_l) >= delta * grad'(pi - pi_l), pi_l = Pi_P[pi - beta^l
// s_bar grad]. `evaluate` must return the true leader value at a trial price
// (re-solving the follower equilibrium).
ArmijoResult armijo_step(const Vec& pi, double J_pi, const Vec& grad,
                         const std::function<double(const Vec&)>& evaluate,
                         const Vec& lo, const Vec& hi, const LeaderConfig& cfg);

struct TraceRow {
  int t = 0;
  Vec pi;
  double JL = 0.0;
  Vec gradient;
  double grad_norm = 0.0;
  int armijo_l = 0;
  double step = 0.0;
  int nash_iters = 0;  // Picard iterations spent during this outer iteration
  double wall_ms = 0.0;
};

struct LeaderTrace {
  std::vector<TraceRow> rows;
};

struct StackelbergResult {
  Vec pi;
  JointStrategy x;
  double value = 0.0;
  Vec gradient;
  LeaderTrace trace;
  std::string termination;  // "stationary", "stalled", "max_outer"
  std::vector<std::string> warnings;
};

// Projected gradient descent for the leader: alternate equilibrium solve,
// follower Jacobians, total gradient, Armijo step, until the projected
// displacement at full step s_bar drops below stat_tol.
StackelbergResult solve_stackelberg(const PricingGame& game, const Vec& pi0,
                                    const NashConfig& nash_cfg = {},
                                    const LeaderConfig& cfg = {},
                                    const SensitivityConfig& sens_cfg = {});

}  // namespace spg
