#include "spg/nash.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "spg/errors.hpp"
#include "spg/game.hpp"
#include "spg/projection.hpp"

namespace spg {

namespace {

// Spectral norm of I - gamma*F1 for symmetric F1 with extreme eigenvalues
// lmin <= lmax: the maximum of |1 - gamma*l| is attained at an extreme.
double picard_factor(double gamma, double lmin, double lmax) {
  return std::max(std::abs(1.0 - gamma * lmin), std::abs(1.0 - gamma * lmax));
}

}  // namespace

ContractionParams contraction_params(const PricingGame& game) {
  const F1Info info = assemble_F1(game);
  ContractionParams out;
  out.gamma = 2.0 / (info.lambda_min + info.lambda_max);
  out.q = picard_factor(out.gamma, info.lambda_min, info.lambda_max);
  return out;
}

NashResult solve_nash(const PricingGame& game, const Vec& pi,
                      const NashConfig& cfg,
                      const std::optional<JointStrategy>& x0) {
  check_dimensions(game);
  const int N = game.num_followers();
  const int d = game.follower_dim();
  if (pi.size() != game.price_dim())
    throw DimensionError("pi has length " + std::to_string(pi.size()) +
                         ", expected " + std::to_string(game.price_dim()));

  NashResult res;
  for (int k = 0; k < pi.size(); ++k) {
    if (pi(k) < game.price_lo(k) - 1e-12 || pi(k) > game.price_hi(k) + 1e-12) {
      res.warnings.push_back("pi(" + std::to_string(k) +
                             ") lies outside the leader's price box");
      break;
    }
  }

  const F1Info info = assemble_F1(game);
  double gamma, q;
  if (cfg.gamma) {
    gamma = *cfg.gamma;
    q = picard_factor(gamma, info.lambda_min, info.lambda_max);
    if (!(q < 1.0))
      throw Error("step size gamma=" + std::to_string(gamma) +
                  " is not contractive: ||I - gamma*F1|| = " +
                  std::to_string(q));
  } else {
    gamma = 2.0 / (info.lambda_min + info.lambda_max);
    q = picard_factor(gamma, info.lambda_min, info.lambda_max);
  }

  std::vector<std::unique_ptr<ActiveSetQp>> proj;
  proj.reserve(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i)
    proj.push_back(
        std::make_unique<ActiveSetQp>(Polyhedron::of(game.followers[i])));

  JointStrategy x;
  if (x0) {
    x = *x0;
    if (x.num_followers() != N || (N > 0 && x.block(0).size() != d))
      throw DimensionError("x0 does not match the game's follower layout");
  } else {
    std::vector<Vec> blocks;
    blocks.reserve(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i)
      blocks.push_back(proj[static_cast<size_t>(i)]->project(Vec::Zero(d)).x);
    x = JointStrategy(blocks);
  }

  res.proj_eq_duals.assign(static_cast<size_t>(N), Vec());
  res.proj_ineq_duals.assign(static_cast<size_t>(N), Vec());

  int max_iter = cfg.max_iter.value_or(0);
  const int hard_cap = cfg.max_iter.value_or(5'000'000);

  int k = 0;
  while (true) {
    const Vec grad = pseudo_gradient(game, x, pi);
    std::vector<Vec> next(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
      const Vec target = x.block(i) - gamma * grad.segment(i * d, d);
      auto pr = proj[static_cast<size_t>(i)]->project(target);
      next[static_cast<size_t>(i)] = std::move(pr.x);
      res.proj_eq_duals[static_cast<size_t>(i)] = std::move(pr.eq_duals);
      res.proj_ineq_duals[static_cast<size_t>(i)] = std::move(pr.ineq_duals);
    }
    JointStrategy xn(next);
    const double r = (xn.stacked() - x.stacked()).norm();
    res.residual_history.push_back(r);
    x = std::move(xn);
    ++k;

    if (k == 1 && !cfg.max_iter) {
      // A priori bound: q^k * r0 <= eps, padded for floating-point slack.
      if (r <= cfg.eps || q <= 0.0) {
        max_iter = k + 1000;
      } else {
        max_iter = static_cast<int>(
                       std::ceil(std::log(cfg.eps / r) / std::log(q))) +
                   1000;
      }
      max_iter = std::min(max_iter, hard_cap);
    }

    if (r <= cfg.eps) break;
    if (k >= std::max(max_iter, 1))
      throw NonconvergenceError(
          "Picard iteration did not reach eps=" + std::to_string(cfg.eps) +
              " within " + std::to_string(k) + " iterations (q=" +
              std::to_string(q) + ")",
          res.residual_history);
  }

  res.x = std::move(x);
  res.iterations = k;
  res.residual = res.residual_history.back();
  return res;
}

BestResponse best_response_qp(const FollowerSpec& follower,
                              const Vec& sigma_others, const Vec& pi,
                              double tol) {
  const Vec c = follower.Q * sigma_others + follower.r + follower.S * pi;
  ActiveSetQp qp(Polyhedron::of(follower), tol);
  auto sol = qp.minimize(follower.P, c);
  BestResponse out;
  out.x = std::move(sol.x);
  out.ineq_duals = std::move(sol.ineq_duals);
  out.eq_duals = std::move(sol.eq_duals);
  out.kkt_residual = sol.kkt_residual;
  return out;
}

NashVerification verify_nash(const PricingGame& game, const JointStrategy& x,
                             const Vec& pi) {
  check_dimensions(game);
  NashVerification out;
  out.deviations.resize(static_cast<size_t>(game.num_followers()));
  for (int i = 0; i < game.num_followers(); ++i) {
    const Vec sigma_others = x.aggregate_excluding(i);
    const BestResponse br = best_response_qp(game.followers[static_cast<size_t>(i)],
                                             sigma_others, pi);
    const double dev = (x.block(i) - br.x).norm();
    out.deviations[static_cast<size_t>(i)] = dev;
    if (dev > out.worst_deviation) {
      out.worst_deviation = dev;
      out.worst_follower = i;
    }
  }
  if (out.worst_follower < 0 && game.num_followers() > 0) out.worst_follower = 0;
  return out;
}

}  // namespace spg
