#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace spg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One follower of the pricing game:
//   J^i(x^i, x^-i, pi) = 1/2 x^T P x + x^T Q sigma(x^-i) + r^T x + x^T S pi
// over the polyhedron {x : A x = b, G x <= h}. Either constraint block may be
// empty (0 rows). P and Q are shared across followers; r and S may differ.
struct FollowerSpec {
  Mat P;  // m_F x m_F, symmetric positive definite
  Mat Q;  // m_F x m_F, symmetric positive semidefinite, P - Q > 0
  Vec r;  // m_F
  Mat S;  // m_F x m_L, nonnegative entries, diagonal when square
  Mat A;  // m_eq x m_F
  Vec b;  // m_eq
  Mat G;  // m_ineq x m_F
  Vec h;  // m_ineq

  int dim() const { return static_cast<int>(P.rows()); }
  int num_eq() const { return static_cast<int>(A.rows()); }
  int num_ineq() const { return static_cast<int>(G.rows()); }
  int price_dim() const { return static_cast<int>(S.cols()); }

  // Gradient of J^i in x^i at (x, sigma_others, pi).
  Vec cost_gradient(const Vec& x, const Vec& sigma_others, const Vec& pi) const {
    return P * x + Q * sigma_others + r + S * pi;
  }

  double cost(const Vec& x, const Vec& sigma_others, const Vec& pi) const {
    return 0.5 * x.dot(P * x) + x.dot(Q * sigma_others) + r.dot(x) +
           x.dot(S * pi);
  }
};

// Joint strategy of all followers. Blocks are stored per follower; the
// concatenation order is the follower index. aggregate_excluding is computed
// as aggregate() - block so that sigma(x^-i) + x^i == sigma(x) holds exactly.
class JointStrategy {
public:
  JointStrategy() = default;
  explicit JointStrategy(std::vector<Vec> blocks) : blocks_(std::move(blocks)) {
    cache_aggregate();
  }
  static JointStrategy zeros(int n_followers, int dim) {
    std::vector<Vec> blocks(n_followers, Vec::Zero(dim));
    return JointStrategy(std::move(blocks));
  }
  static JointStrategy from_stacked(const Vec& stacked, int n_followers);

  int num_followers() const { return static_cast<int>(blocks_.size()); }
  int block_dim() const { return blocks_.empty() ? 0 : static_cast<int>(blocks_[0].size()); }

  const Vec& block(int i) const { return blocks_.at(i); }
  const std::vector<Vec>& blocks() const { return blocks_; }

  void set_block(int i, Vec v) {
    blocks_.at(i) = std::move(v);
    cache_aggregate();
  }

  Vec stacked() const;
  const Vec& aggregate() const { return aggregate_; }
  Vec aggregate_excluding(int i) const { return aggregate_ - blocks_.at(i); }

private:
  void cache_aggregate();
  std::vector<Vec> blocks_;
  Vec aggregate_;
};

// Leader objective contract: a value and the two partial derivative families
// the gradient assembly needs. The partial in pi excludes the indirect
// dependence through the equilibrium; that part is added via the follower
// Jacobians.
class LeaderObjective {
public:
  virtual ~LeaderObjective() = default;
  virtual double value(const JointStrategy& x, const Vec& pi) const = 0;
  virtual Vec price_partial(const JointStrategy& x, const Vec& pi) const = 0;
  virtual Vec strategy_partial(int follower, const JointStrategy& x,
                               const Vec& pi) const = 0;
  virtual std::string kind() const = 0;
};

// 1/2 || sigma(x) - n_des ||^2. price_partial is identically zero and the
// strategy partial is sigma(x) - n_des for every follower.
class TrackingObjective final : public LeaderObjective {
public:
  explicit TrackingObjective(Vec n_des) : n_des_(std::move(n_des)) {}
  double value(const JointStrategy& x, const Vec&) const override {
    return 0.5 * (x.aggregate() - n_des_).squaredNorm();
  }
  Vec price_partial(const JointStrategy&, const Vec& pi) const override {
    return Vec::Zero(pi.size());
  }
  Vec strategy_partial(int, const JointStrategy& x, const Vec&) const override {
    return x.aggregate() - n_des_;
  }
  std::string kind() const override { return "tracking"; }
  const Vec& n_des() const { return n_des_; }

private:
  Vec n_des_;
};

// The whole game: followers (shared P and Q), the leader's price box and its
// objective. Immutable after construction; all solver entry points take it by
// const reference.
struct PricingGame {
  std::vector<FollowerSpec> followers;
  Vec price_lo;
  Vec price_hi;
  std::shared_ptr<const LeaderObjective> objective;

  int num_followers() const { return static_cast<int>(followers.size()); }
  int follower_dim() const { return followers.empty() ? 0 : followers[0].dim(); }
  int price_dim() const { return static_cast<int>(price_lo.size()); }
  int joint_dim() const { return num_followers() * follower_dim(); }
};

// Throws DimensionError naming the follower and field on any mismatch.
// Called by every solver entry point before numerical work starts.
void check_dimensions(const PricingGame& game);

}  // namespace spg
