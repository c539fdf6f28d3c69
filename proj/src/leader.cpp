#include "spg/leader.hpp"

#include <chrono>
#include <cmath>

#include "spg/errors.hpp"
#include "spg/game.hpp"
#include "spg/projection.hpp"

namespace spg {

void LeaderConfig::check() const {
  if (!(beta > 0.0 && beta < 1.0))
    throw Error("beta must lie in (0,1), got " + std::to_string(beta));
  if (!(s_bar > 0.0))
    throw Error("s_bar must be positive, got " + std::to_string(s_bar));
  if (!(delta > 0.0 && delta < 1.0))
    throw Error("delta must lie in (0,1), got " + std::to_string(delta));
  if (max_outer < 0)
    throw Error("max_outer must be nonnegative, got " +
                std::to_string(max_outer));
  if (l_max < 0)
    throw Error("l_max must be nonnegative, got " + std::to_string(l_max));
  if (stat_tol && !(*stat_tol > 0.0))
    throw Error("stat_tol must be positive, got " + std::to_string(*stat_tol));
}

Vec total_gradient(const PricingGame& game, const JointStrategy& x,
                   const std::vector<SensitivityResult>& jacobians,
                   const Vec& pi) {
  if (static_cast<int>(jacobians.size()) != game.num_followers())
    throw DimensionError("expected one Jacobian per follower");
  Vec g = game.objective->price_partial(x, pi);
  for (int i = 0; i < game.num_followers(); ++i)
    g += jacobians[static_cast<size_t>(i)].jacobian.transpose() *
         game.objective->strategy_partial(i, x, pi);
  return g;
}

ArmijoResult armijo_step(const Vec& pi, double J_pi, const Vec& grad,
                         const std::function<double(const Vec&)>& evaluate,
                         const Vec& lo, const Vec& hi,
                         const LeaderConfig& cfg) {
  cfg.check();
  ArmijoResult out;

  const Vec full = project_box(pi - cfg.s_bar * grad, lo, hi);
  if ((full - pi).norm() == 0.0) {
    out.pi_next = pi;
    out.l = 0;
    out.step = cfg.s_bar;
    out.J_next = J_pi;
    return out;
  }

  double s = cfg.s_bar;
  for (int l = 0; l <= cfg.l_max; ++l, s *= cfg.beta) {
    const Vec trial = project_box(pi - s * grad, lo, hi);
    const double J_trial = evaluate(trial);
    const double rhs = cfg.delta * grad.dot(pi - trial);
    if (J_pi - J_trial >= rhs) {
      out.pi_next = trial;
      out.l = l;
      out.step = s;
      out.J_next = J_trial;
      return out;
    }
  }
  out.pi_next = pi;
  out.l = cfg.l_max;
  out.step = s / cfg.beta;
  out.J_next = J_pi;
  out.stalled = true;
  return out;
}

StackelbergResult solve_stackelberg(const PricingGame& game, const Vec& pi0,
                                    const NashConfig& nash_cfg,
                                    const LeaderConfig& cfg,
                                    const SensitivityConfig& sens_cfg) {
  using clock = std::chrono::steady_clock;
  check_dimensions(game);
  cfg.check();
  SensitivityConfig sens = sens_cfg;
  sens.nash_eps = nash_cfg.eps;
  sens.check();

  StackelbergResult res;
  Vec pi = project_box(pi0, game.price_lo, game.price_hi);
  if ((pi - pi0).norm() > 0.0)
    res.warnings.push_back("pi0 outside the price box; projected onto it");

  NashResult nash = solve_nash(game, pi, nash_cfg);
  int pending_nash_iters = nash.iterations;
  double J = game.objective->value(nash.x, pi);
  std::optional<double> stat_tol = cfg.stat_tol;

  for (int t = 0; t < cfg.max_outer; ++t) {
    const auto tic = clock::now();
    std::vector<SensitivityResult> jacobians;
    try {
      jacobians = game_jacobians(game, nash.x, pi, sens);
    } catch (const RankError& e) {
      throw RankError("outer iteration " + std::to_string(t) + ": " + e.what(),
                      e.dependent_rows);
    }
    const Vec grad = total_gradient(game, nash.x, jacobians, pi);
    if (!stat_tol)
      stat_tol = std::max(1e-9 * cfg.s_bar * grad.norm(), 1e-14);

    TraceRow row;
    row.t = t;
    row.pi = pi;
    row.JL = J;
    row.gradient = grad;
    row.grad_norm = grad.norm();
    row.nash_iters = pending_nash_iters;
    pending_nash_iters = 0;

    const Vec full_step =
        project_box(pi - cfg.s_bar * grad, game.price_lo, game.price_hi);
    if ((pi - full_step).norm() <= *stat_tol) {
      row.armijo_l = 0;
      row.step = 0.0;
      row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - tic)
                        .count();
      res.trace.rows.push_back(std::move(row));
      res.termination = "stationary";
      break;
    }

    // Every trial re-solves the equilibrium, warm-started from the current
    // one; the accepted trial's equilibrium carries into the next iteration.
    Vec cached_pi;
    NashResult cached_nash;
    auto evaluate = [&](const Vec& trial) {
      NashResult trial_nash;
      try {
        trial_nash = solve_nash(game, trial, nash_cfg, nash.x);
      } catch (const NonconvergenceError& e) {
        throw NonconvergenceError("outer iteration " + std::to_string(t) +
                                      ": " + e.what(),
                                  e.residual_history);
      }
      pending_nash_iters += trial_nash.iterations;
      const double value = game.objective->value(trial_nash.x, trial);
      cached_pi = trial;
      cached_nash = std::move(trial_nash);
      return value;
    };

    const ArmijoResult arm =
        armijo_step(pi, J, grad, evaluate, game.price_lo, game.price_hi, cfg);
    row.armijo_l = arm.l;
    row.step = arm.step;
    row.nash_iters += pending_nash_iters;
    pending_nash_iters = 0;
    row.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - tic).count();
    res.trace.rows.push_back(std::move(row));

    if (arm.stalled) {
      res.warnings.push_back(
          "Armijo backtracking exhausted l_max=" + std::to_string(cfg.l_max) +
          " at iteration " + std::to_string(t) + "; treating as stationary");
      res.termination = "stalled";
      break;
    }

    if (arm.J_next > J + 1e-12 * std::max(1.0, std::abs(J)))
      throw MonotonicityError("leader value increased from " +
                              std::to_string(J) + " to " +
                              std::to_string(arm.J_next) + " at iteration " +
                              std::to_string(t));

    pi = arm.pi_next;
    J = arm.J_next;
    if (cached_pi.size() == pi.size() && cached_pi == pi) {
      nash = std::move(cached_nash);
    } else {
      try {
        nash = solve_nash(game, pi, nash_cfg, nash.x);
      } catch (const NonconvergenceError& e) {
        throw NonconvergenceError("outer iteration " + std::to_string(t) +
                                      ": " + e.what(),
                                  e.residual_history);
      }
      pending_nash_iters += nash.iterations;
    }
  }

  if (res.termination.empty()) res.termination = "max_outer";

  res.pi = pi;
  res.x = nash.x;
  res.value = J;
  if (!res.trace.rows.empty()) res.gradient = res.trace.rows.back().gradient;
  return res;
}

}  // namespace spg
