#include "spg/game.hpp"

#include <Eigen/Eigenvalues>

#include "spg/errors.hpp"

namespace spg {

Vec pseudo_gradient(const PricingGame& game, const JointStrategy& x,
                    const Vec& pi) {
  check_dimensions(game);
  const int n = game.num_followers();
  const int d = game.follower_dim();
  if (x.num_followers() != n || x.block_dim() != d)
    throw DimensionError("pseudo_gradient: strategy does not match the game");
  if (pi.size() != game.price_dim())
    throw DimensionError("pseudo_gradient: price vector has wrong length");
  Vec out(n * d);
  for (int i = 0; i < n; ++i) {
    out.segment(i * d, d) =
        game.followers[i].cost_gradient(x.block(i), x.aggregate_excluding(i), pi);
  }
  return out;
}

F1Info assemble_F1(const PricingGame& game) {
  check_dimensions(game);
  const int n = game.num_followers();
  const int d = game.follower_dim();
  const Mat& P = game.followers[0].P;
  const Mat& Q = game.followers[0].Q;
  F1Info info;
  info.F1 = Mat::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      info.F1.block(i * d, j * d, d, d) = (i == j) ? P : Q;
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(info.F1);
  info.lambda_min = es.eigenvalues().minCoeff();
  info.lambda_max = es.eigenvalues().maxCoeff();
  if (info.lambda_min <= 0.0)
    throw MonotonicityError(
        "assemble_F1: F1 is not positive definite (lambda_min = " +
        std::to_string(info.lambda_min) + "); the game is not strictly monotone");
  return info;
}

LeaderEval leader_value_and_partials(const PricingGame& game,
                                     const JointStrategy& x, const Vec& pi) {
  check_dimensions(game);
  LeaderEval out;
  out.value = game.objective->value(x, pi);
  out.d_pi = game.objective->price_partial(x, pi);
  out.d_x.reserve(game.num_followers());
  for (int i = 0; i < game.num_followers(); ++i)
    out.d_x.push_back(game.objective->strategy_partial(i, x, pi));
  return out;
}

}  // namespace spg
