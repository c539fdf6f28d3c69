#include "spg/validation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "spg/linprog.hpp"

namespace spg {

namespace {

constexpr double kSlaterTol = 1e-9;

double eig_tol(const Mat& m) { return 1e-10 * std::max(1.0, m.norm()); }

bool is_symmetric(const Mat& m) {
  return (m - m.transpose()).lpNorm<Eigen::Infinity>() <=
         1e-12 * std::max(1.0, m.lpNorm<Eigen::Infinity>());
}

// Smallest eigenvalue of the symmetrized matrix.
double min_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "pass" : "FAIL") << "  " << c.name;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  for (const auto& w : warnings) os << "warn  " << w << "\n";
  return os.str();
}

ValidationReport validate_game(const PricingGame& game) {
  check_dimensions(game);
  ValidationReport rep;
  rep.slater_points.resize(game.num_followers());

  const auto add = [&rep](std::string name, bool pass, std::string detail = "") {
    rep.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  const Mat& P0 = game.followers[0].P;
  const Mat& Q0 = game.followers[0].Q;
  for (int i = 0; i < game.num_followers(); ++i) {
    const FollowerSpec& f = game.followers[i];
    const std::string tag = "followers[" + std::to_string(i) + "].";

    const bool p_sym = is_symmetric(f.P);
    add(tag + "P_sym", p_sym);
    const double p_min = min_eig(f.P);
    add(tag + "P_pd", p_sym && p_min > eig_tol(f.P),
        p_sym ? "min eigenvalue " + fmt(p_min) : "not symmetric");

    const bool q_sym = is_symmetric(f.Q);
    add(tag + "Q_sym", q_sym);
    const double q_min = min_eig(f.Q);
    add(tag + "Q_psd", q_sym && q_min >= -eig_tol(f.Q),
        q_sym ? "min eigenvalue " + fmt(q_min) : "not symmetric");

    const double pq_min = min_eig(f.P - f.Q);
    add(tag + "PminusQ_pd", pq_min > eig_tol(f.P),
        "min eigenvalue " + fmt(pq_min));

    double s_min = f.S.size() > 0 ? f.S.minCoeff() : 0.0;
    add(tag + "S_nonneg", s_min >= 0.0, "min entry " + fmt(s_min));
    if (f.S.rows() == f.S.cols()) {
      const Mat off = f.S - Mat(f.S.diagonal().asDiagonal());
      add(tag + "S_diagonal",
          off.lpNorm<Eigen::Infinity>() <=
              1e-12 * std::max(1.0, f.S.lpNorm<Eigen::Infinity>()));
    }

    SlaterCertificate cert = slater_point(f.A, f.b, f.G, f.h);
    add(tag + "feasible", cert.feasible,
        cert.feasible ? "" : "phase-1 LP infeasible");
    const bool strict = cert.feasible && cert.margin > kSlaterTol;
    add(tag + "slater", strict,
        cert.feasible ? "margin " + fmt(cert.margin) : "set is empty");
    if (strict) rep.slater_points[i] = cert.point;

    BoundednessCheck bc = check_bounded(f.A, f.b, f.G, f.h, f.dim());
    add(tag + "bounded", bc.bounded,
        bc.bounded ? ""
                   : "unbounded along " + std::string(bc.direction > 0 ? "+" : "-") +
                         "e_" + std::to_string(bc.axis));

    if (i > 0) {
      const bool same =
          (f.P - P0).lpNorm<Eigen::Infinity>() <=
              1e-12 * std::max(1.0, P0.lpNorm<Eigen::Infinity>()) &&
          (f.Q - Q0).lpNorm<Eigen::Infinity>() <=
              1e-12 * std::max(1.0, Q0.lpNorm<Eigen::Infinity>());
      add(tag + "shared_PQ", same,
          same ? "" : "P or Q differs from follower 0");
    }
  }

  bool box_ok = true;
  int bad_j = -1;
  for (int j = 0; j < game.price_dim(); ++j) {
    if (game.price_lo(j) > game.price_hi(j)) {
      box_ok = false;
      bad_j = j;
      break;
    }
  }
  add("price_box", box_ok,
      box_ok ? "" : "lo > hi at coordinate " + std::to_string(bad_j));

  // Heterogeneous price weights are allowed; the translation-invariance
  // result simply does not apply then, so only warn.
  for (int i = 1; i < game.num_followers(); ++i) {
    if ((game.followers[i].S - game.followers[0].S).lpNorm<Eigen::Infinity>() >
        1e-12 * std::max(1.0, game.followers[0].S.lpNorm<Eigen::Infinity>())) {
      rep.warnings.push_back("followers have heterogeneous S matrices");
      break;
    }
  }

  return rep;
}

}  // namespace spg
