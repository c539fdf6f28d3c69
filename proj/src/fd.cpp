#include "spg/fd.hpp"

#include <string>

#include "spg/errors.hpp"
#include "spg/leader.hpp"

namespace spg {

namespace {

constexpr double kStencilActTol = 1e-8;

std::vector<int> active_rows(const FollowerSpec& f, const Vec& x) {
  return detect_active_set(f, x, kStencilActTol).active;
}

}  // namespace

Mat fd_jacobian(const FollowerSpec& follower, const Vec& sigma_others,
                const Vec& pi, double step) {
  if (!(step > 0.0))
    throw Error("fd step must be positive, got " + std::to_string(step));
  const int mL = follower.price_dim();
  const Vec x_center = best_response_qp(follower, sigma_others, pi).x;
  const std::vector<int> center_set = active_rows(follower, x_center);

  const double candidates[] = {step, step / 10.0, step * 10.0};
  std::string flips;
  for (double s : candidates) {
    Mat J(follower.dim(), mL);
    bool stable = true;
    for (int k = 0; k < mL && stable; ++k) {
      Vec lo = pi, hi = pi;
      hi(k) += s;
      lo(k) -= s;
      const Vec x_hi = best_response_qp(follower, sigma_others, hi).x;
      const Vec x_lo = best_response_qp(follower, sigma_others, lo).x;
      if (active_rows(follower, x_hi) != center_set ||
          active_rows(follower, x_lo) != center_set) {
        stable = false;
        flips += (flips.empty() ? "" : ", ") + std::string("pi_") +
                 std::to_string(k + 1) + "@" + std::to_string(s);
        break;
      }
      J.col(k) = (x_hi - x_lo) / (2.0 * s);
    }
    if (stable) return J;
  }
  throw UnreliableStencilError(
      "active set flips inside the difference stencil (" + flips +
      "); the best response is not differentiable here");
}

FdGradientReport fd_total_gradient(const PricingGame& game, const Vec& pi,
                                   double step, const NashConfig& nash_cfg,
                                   const SensitivityConfig& sens_cfg) {
  if (!(step > 0.0))
    throw Error("fd step must be positive, got " + std::to_string(step));
  check_dimensions(game);
  const int mL = game.price_dim();

  const NashResult center = solve_nash(game, pi, nash_cfg);
  SensitivityConfig sens = sens_cfg;
  sens.nash_eps = nash_cfg.eps;
  const auto jacobians = game_jacobians(game, center.x, pi, sens);

  FdGradientReport out;
  out.assembled = total_gradient(game, center.x, jacobians, pi);
  out.fd = Vec(mL);
  for (int k = 0; k < mL; ++k) {
    Vec lo = pi, hi = pi;
    hi(k) += step;
    lo(k) -= step;
    const NashResult n_hi = solve_nash(game, hi, nash_cfg, center.x);
    const NashResult n_lo = solve_nash(game, lo, nash_cfg, center.x);
    out.fd(k) = (game.objective->value(n_hi.x, hi) -
                 game.objective->value(n_lo.x, lo)) /
                (2.0 * step);
  }
  out.discrepancy = (out.fd - out.assembled).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace spg
