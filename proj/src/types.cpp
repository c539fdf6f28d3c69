#include "spg/types.hpp"

#include "spg/errors.hpp"

namespace spg {

JointStrategy JointStrategy::from_stacked(const Vec& stacked, int n_followers) {
  if (n_followers <= 0 || stacked.size() % n_followers != 0) {
    throw DimensionError("from_stacked: stacked size " +
                         std::to_string(stacked.size()) +
                         " not divisible into " + std::to_string(n_followers) +
                         " blocks");
  }
  const int dim = static_cast<int>(stacked.size()) / n_followers;
  std::vector<Vec> blocks(n_followers);
  for (int i = 0; i < n_followers; ++i) blocks[i] = stacked.segment(i * dim, dim);
  return JointStrategy(std::move(blocks));
}

Vec JointStrategy::stacked() const {
  const int n = num_followers();
  const int d = block_dim();
  Vec out(n * d);
  for (int i = 0; i < n; ++i) out.segment(i * d, d) = blocks_[i];
  return out;
}

void JointStrategy::cache_aggregate() {
  if (blocks_.empty()) {
    aggregate_ = Vec();
    return;
  }
  aggregate_ = Vec::Zero(blocks_[0].size());
  for (const Vec& b : blocks_) {
    if (b.size() != aggregate_.size())
      throw DimensionError("JointStrategy: blocks of unequal dimension");
    aggregate_ += b;
  }
}

namespace {

void check_follower(const FollowerSpec& f, int idx, int m_l) {
  const auto fail = [idx](const std::string& field, const std::string& why) {
    throw DimensionError("followers[" + std::to_string(idx) + "]." + field +
                         ": " + why);
  };
  const int m = f.dim();
  if (f.P.rows() != m || f.P.cols() != m) fail("P", "must be square m_F x m_F");
  if (f.Q.rows() != m || f.Q.cols() != m) fail("Q", "must be m_F x m_F");
  if (f.r.size() != m) fail("r", "must have length m_F");
  if (f.S.rows() != m) fail("S", "row count must equal m_F");
  if (f.S.cols() != m_l) fail("S", "column count must equal the price dimension");
  if (f.A.size() > 0 && f.A.cols() != m) fail("A", "column count must equal m_F");
  if (f.b.size() != f.A.rows()) fail("b", "length must match rows of A");
  if (f.G.size() > 0 && f.G.cols() != m) fail("G", "column count must equal m_F");
  if (f.h.size() != f.G.rows()) fail("h", "length must match rows of G");
}

}  // namespace

void check_dimensions(const PricingGame& game) {
  if (game.followers.empty())
    throw DimensionError("game must have at least one follower");
  if (game.price_lo.size() != game.price_hi.size())
    throw DimensionError("price_lo and price_hi must have equal length");
  if (!game.objective) throw DimensionError("game has no leader objective");
  const int m_f = game.follower_dim();
  const int m_l = game.price_dim();
  for (int i = 0; i < game.num_followers(); ++i) {
    if (game.followers[i].dim() != m_f)
      throw DimensionError("followers[" + std::to_string(i) +
                           "]: all followers must share m_F");
    check_follower(game.followers[i], i, m_l);
  }
}

}  // namespace spg
