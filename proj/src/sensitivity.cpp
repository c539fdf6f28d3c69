#include "spg/sensitivity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spg/errors.hpp"

namespace spg {

namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kStationarityTol = 1e-6;
constexpr double kConditionLimit = 1e12;

std::string row_label(const EquivalentProblem& eq, int bar_row, int num_eq) {
  if (bar_row < num_eq) return "eq[" + std::to_string(bar_row) + "]";
  return "ineq[" +
         std::to_string(eq.active_rows[static_cast<size_t>(bar_row - num_eq)]) +
         "]";
}

}  // namespace

void SensitivityConfig::check() const {
  if (!(tau_act > 0.0))
    throw Error("tau_act must be positive, got " + std::to_string(tau_act));
  if (tau_act < 10.0 * nash_eps)
    throw Error("tau_act=" + std::to_string(tau_act) +
                " must be at least 10x the Nash tolerance eps=" +
                std::to_string(nash_eps) +
                "; equilibrium noise would corrupt the active set");
}

ActiveSetInfo detect_active_set(const FollowerSpec& follower, const Vec& x,
                                double tau_act) {
  if (x.size() != follower.dim())
    throw DimensionError("x has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(follower.dim()));
  ActiveSetInfo info;
  info.tolerance = tau_act;
  info.worst_violation = -std::numeric_limits<double>::infinity();
  info.closest_inactive = std::numeric_limits<double>::infinity();

  for (int k = 0; k < follower.num_eq(); ++k) {
    const double defect = std::abs(follower.A.row(k).dot(x) - follower.b(k));
    if (defect > tau_act)
      throw InfeasiblePointError("equality row " + std::to_string(k) +
                                 " violated by " + std::to_string(defect) +
                                 " (tolerance " + std::to_string(tau_act) +
                                 ")");
  }
  for (int j = 0; j < follower.num_ineq(); ++j) {
    const double margin = follower.G.row(j).dot(x) - follower.h(j);
    if (margin > tau_act)
      throw InfeasiblePointError("inequality row " + std::to_string(j) +
                                 " violated by " + std::to_string(margin) +
                                 " (tolerance " + std::to_string(tau_act) +
                                 ")");
    info.worst_violation = std::max(info.worst_violation, margin);
    if (std::abs(margin) <= tau_act) {
      info.active.push_back(j);
    } else {
      info.inactive.push_back(j);
      info.closest_inactive = std::min(info.closest_inactive, -margin);
    }
  }
  if (follower.num_ineq() == 0) info.worst_violation = 0.0;
  return info;
}

EquivalentProblem build_equivalent_problem(const FollowerSpec& follower,
                                           const ActiveSetInfo& info) {
  EquivalentProblem eq;
  const int m_eq = follower.num_eq();
  const int d = follower.dim();

  std::vector<int> kept;
  auto duplicates_earlier = [&](int j) {
    for (int k = 0; k < m_eq; ++k)
      if (follower.A.row(k) == follower.G.row(j) &&
          follower.b(k) == follower.h(j))
        return true;
    for (int other : kept)
      if (follower.G.row(other) == follower.G.row(j) &&
          follower.h(other) == follower.h(j))
        return true;
    return false;
  };
  for (int j : info.active)
    if (!duplicates_earlier(j)) kept.push_back(j);

  eq.A_bar.resize(m_eq + static_cast<int>(kept.size()), d);
  eq.b_bar.resize(eq.A_bar.rows());
  eq.A_bar.topRows(m_eq) = follower.A;
  eq.b_bar.head(m_eq) = follower.b;
  for (size_t t = 0; t < kept.size(); ++t) {
    eq.A_bar.row(m_eq + static_cast<int>(t)) = follower.G.row(kept[t]);
    eq.b_bar(m_eq + static_cast<int>(t)) = follower.h(kept[t]);
  }
  eq.active_rows = kept;
  eq.inactive_rows = info.inactive;

  eq.G_inact.resize(static_cast<int>(info.inactive.size()), d);
  eq.h_inact.resize(eq.G_inact.rows());
  for (size_t t = 0; t < info.inactive.size(); ++t) {
    eq.G_inact.row(static_cast<int>(t)) = follower.G.row(info.inactive[t]);
    eq.h_inact(static_cast<int>(t)) = follower.h(info.inactive[t]);
  }

  if (eq.A_bar.rows() == 0) {
    eq.rank = 0;
    return eq;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(eq.A_bar.transpose());
  qr.setThreshold(kRankThreshold);
  eq.rank = static_cast<int>(qr.rank());
  if (eq.rank < eq.A_bar.rows()) {
    const auto perm = qr.colsPermutation().indices();
    std::vector<std::string> dependent;
    std::string names;
    for (int t = eq.rank; t < eq.A_bar.rows(); ++t) {
      dependent.push_back(row_label(eq, perm(t), m_eq));
      if (!names.empty()) names += ", ";
      names += dependent.back();
    }
    throw RankError(
        "pinned constraint matrix is row-rank deficient (rank " +
            std::to_string(eq.rank) + " of " + std::to_string(eq.A_bar.rows()) +
            "); dependent rows: " + names,
        dependent);
  }
  return eq;
}

DualRecovery recover_duals(const FollowerSpec& follower,
                           const EquivalentProblem& eq, const Vec& x,
                           const Vec& sigma_others, const Vec& pi) {
  const Vec grad = follower.cost_gradient(x, sigma_others, pi);
  DualRecovery out;
  if (eq.A_bar.rows() == 0) {
    out.nu_bar = Vec();
    out.residual = grad.norm();
  } else {
    out.nu_bar = eq.A_bar.transpose()
                     .colPivHouseholderQr()
                     .solve(-grad)
                     .eval();
    out.residual = (eq.A_bar.transpose() * out.nu_bar + grad).norm();
  }
  const double scale = std::max(1.0, grad.norm());
  if (out.residual > kStationarityTol * scale)
    throw StaleEquilibriumError(
        "stationarity residual " + std::to_string(out.residual) +
            " exceeds " + std::to_string(kStationarityTol * scale) +
            "; the point is not an equilibrium at this tolerance",
        out.residual);
  return out;
}

KktSystem assemble_kkt_system(const FollowerSpec& follower,
                              const EquivalentProblem& eq, const Vec& x,
                              const Vec& nu_bar) {
  (void)nu_bar;  // enters the KKT residual only through rows that vanish here
  const int d = follower.dim();
  const int n_in = static_cast<int>(eq.G_inact.rows());
  const int n_eq = static_cast<int>(eq.A_bar.rows());
  const int n = d + n_in + n_eq;

  KktSystem sys;
  sys.D_z = Mat::Zero(n, n);
  sys.D_z.topLeftCorner(d, d) = follower.P;
  if (n_in > 0) {
    sys.D_z.block(0, d, d, n_in) = eq.G_inact.transpose();
    sys.D_z.block(d, d, n_in, n_in) =
        (eq.G_inact * x - eq.h_inact).asDiagonal();
  }
  if (n_eq > 0) {
    sys.D_z.block(0, d + n_in, d, n_eq) = eq.A_bar.transpose();
    sys.D_z.block(d + n_in, 0, n_eq, d) = eq.A_bar;
  }

  sys.D_pi = Mat::Zero(n, follower.price_dim());
  sys.D_pi.topRows(d) = follower.S;

  Eigen::JacobiSVD<Mat> svd(sys.D_z);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  sys.condition = smin > 0.0 ? smax / smin
                             : std::numeric_limits<double>::infinity();
  if (!(sys.condition < kConditionLimit))
    sys.warnings.push_back("KKT matrix condition number " +
                           std::to_string(sys.condition) + " exceeds 1e12");
  return sys;
}

SensitivityResult follower_jacobian(const FollowerSpec& follower, const Vec& x,
                                    const Vec& sigma_others, const Vec& pi,
                                    const SensitivityConfig& cfg) {
  cfg.check();
  SensitivityResult res;
  res.active_set = detect_active_set(follower, x, cfg.tau_act);
  const EquivalentProblem eq = build_equivalent_problem(follower, res.active_set);
  res.rank_A_bar = eq.rank;

  const DualRecovery duals = recover_duals(follower, eq, x, sigma_others, pi);
  res.nu_bar = duals.nu_bar;
  res.stationarity_residual = duals.residual;
  res.lambda = Vec::Zero(follower.num_ineq());
  const int m_eq = follower.num_eq();
  for (size_t t = 0; t < eq.active_rows.size(); ++t) {
    const double mult = duals.nu_bar(m_eq + static_cast<int>(t));
    res.lambda(eq.active_rows[t]) = mult;
    if (std::abs(mult) <= cfg.tau_act)
      res.weakly_active.push_back(eq.active_rows[t]);
  }

  KktSystem sys = assemble_kkt_system(follower, eq, x, duals.nu_bar);
  res.kkt_condition = sys.condition;
  res.warnings = std::move(sys.warnings);

  Eigen::PartialPivLU<Mat> lu(sys.D_z);
  Mat Z = lu.solve(-sys.D_pi);
  Z += lu.solve(-sys.D_pi - sys.D_z * Z);  // one refinement step
  const double defect = (sys.D_z * Z + sys.D_pi).norm();
  const double scale =
      std::max(1.0, sys.D_pi.norm()) * std::max(1.0, sys.D_z.norm());
  if (!Z.allFinite() || defect > 1e-6 * scale)
    throw RankError(
        "KKT matrix is numerically singular; the equilibrium map is not "
        "differentiable at this active set (rank " +
            std::to_string(res.rank_A_bar) + ", condition " +
            std::to_string(sys.condition) + ")",
        {});
  res.jacobian = Z.topRows(follower.dim());
  return res;
}

std::vector<SensitivityResult> game_jacobians(const PricingGame& game,
                                              const JointStrategy& x,
                                              const Vec& pi,
                                              const SensitivityConfig& cfg) {
  check_dimensions(game);
  std::vector<SensitivityResult> out;
  out.reserve(static_cast<size_t>(game.num_followers()));
  for (int i = 0; i < game.num_followers(); ++i)
    out.push_back(follower_jacobian(game.followers[static_cast<size_t>(i)],
                                    x.block(i), x.aggregate_excluding(i), pi,
                                    cfg));
  return out;
}

}  // namespace spg
