#include "spg/projection.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spg/errors.hpp"
#include "spg/linprog.hpp"

namespace spg {

namespace {

constexpr double kRankThreshold = 1e-10;

double feas_scale(const Polyhedron& p) {
  double s = 1.0;
  if (p.b.size() > 0) s = std::max(s, p.b.lpNorm<Eigen::Infinity>());
  if (p.h.size() > 0) s = std::max(s, p.h.lpNorm<Eigen::Infinity>());
  return s;
}

}  // namespace

bool Polyhedron::contains(const Vec& x, double tol) const {
  const double s = tol * feas_scale(*this);
  if (A.rows() > 0 && (A * x - b).lpNorm<Eigen::Infinity>() > s) return false;
  if (G.rows() > 0 && ((G * x - h).maxCoeff()) > s) return false;
  return true;
}

Vec project_box(const Vec& z, const Vec& lo, const Vec& hi) {
  if (z.size() != lo.size() || z.size() != hi.size())
    throw DimensionError("project_box: size mismatch");
  for (int j = 0; j < lo.size(); ++j)
    if (lo(j) > hi(j))
      throw Error("project_box: empty box, lo > hi at coordinate " +
                  std::to_string(j));
  return z.cwiseMax(lo).cwiseMin(hi);
}

EqQpResult solve_eq_qp(const Mat& H, const Vec& c, const Mat& C, const Vec& d) {
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(C.rows());
  if (H.cols() != n || c.size() != n || (m > 0 && C.cols() != n) ||
      d.size() != m)
    throw DimensionError("solve_eq_qp: inconsistent dimensions");

  if (m > 0) {
    Eigen::ColPivHouseholderQR<Mat> qr(C.transpose());
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < m)
      throw RankError("solve_eq_qp: constraint matrix is not full row rank (" +
                      std::to_string(qr.rank()) + " of " + std::to_string(m) +
                      ")");
  }

  Mat K = Mat::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = H;
  if (m > 0) {
    K.topRightCorner(n, m) = C.transpose();
    K.bottomLeftCorner(m, n) = C;
  }
  Vec rhs(n + m);
  rhs.head(n) = -c;
  rhs.tail(m) = d;

  Eigen::PartialPivLU<Mat> lu(K);
  Vec sol = lu.solve(rhs);
  const double scale =
      std::max(1.0, std::max(rhs.lpNorm<Eigen::Infinity>(),
                             K.lpNorm<Eigen::Infinity>()));
  double residual = (K * sol - rhs).lpNorm<Eigen::Infinity>();
  for (int sweep = 0; sweep < 3 && residual > 1e-10 * scale; ++sweep) {
    sol += lu.solve(rhs - K * sol);
    residual = (K * sol - rhs).lpNorm<Eigen::Infinity>();
  }

  EqQpResult out;
  out.x = sol.head(n);
  out.duals = sol.tail(m);
  out.residual = residual;
  if (!sol.allFinite() || residual > 1e-10 * scale)
    throw Error("solve_eq_qp: saddle solve failed, residual " +
                std::to_string(residual));
  return out;
}

ActiveSetQp::ActiveSetQp(Polyhedron poly, double tol) : tol_(tol) {
  // Exact duplicates among inequality rows are removed; their duals are
  // reported as zero. Keeps the feasible set while avoiding spurious rank
  // failures inside the working-set solves.
  orig_ineq_ = poly.num_ineq();
  std::vector<int> keep;
  for (int j = 0; j < poly.num_ineq(); ++j) {
    bool dup = false;
    for (int k : keep) {
      if (poly.h(j) == poly.h(k) && poly.G.row(j) == poly.G.row(k)) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(j);
  }
  poly_.A = std::move(poly.A);
  poly_.b = std::move(poly.b);
  poly_.G = Mat(keep.size(), poly.G.cols());
  poly_.h = Vec(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    poly_.G.row(static_cast<int>(i)) = poly.G.row(keep[i]);
    poly_.h(static_cast<int>(i)) = poly.h(keep[i]);
  }
  row_map_ = std::move(keep);
  max_iter_ = 50 * (orig_ineq_ + 1);
}

Vec ActiveSetQp::feasible_start() {
  SlaterCertificate cert = slater_point(poly_.A, poly_.b, poly_.G, poly_.h);
  if (!cert.feasible)
    throw InfeasibleError("projection: polyhedron is empty (phase-1 certificate)");
  return cert.point;
}

ActiveSetQp::Result ActiveSetQp::minimize(const Mat& H, const Vec& c) {
  const int n = poly_.dim();
  const int m_eq = poly_.num_eq();
  const int m_in = poly_.num_ineq();
  if (H.rows() != n || c.size() != n)
    throw DimensionError("ActiveSetQp: objective dimension mismatch");

  Vec x;
  if (warm_ && warm_->size() == n && poly_.contains(*warm_, 1e-8)) {
    x = *warm_;
  } else {
    x = feasible_start();
  }

  // Working set: inequality rows currently treated as equalities. Start from
  // the rows active at x, pruned so [A; G_W] keeps full row rank.
  std::vector<int> work;
  {
    const double act_tol = 1e-9 * feas_scale(poly_);
    auto stacked_rank = [&](const std::vector<int>& rows) {
      Mat C(m_eq + rows.size(), n);
      if (m_eq > 0) C.topRows(m_eq) = poly_.A;
      for (size_t k = 0; k < rows.size(); ++k)
        C.row(m_eq + static_cast<int>(k)) = poly_.G.row(rows[k]);
      if (C.rows() == 0) return 0L;
      Eigen::ColPivHouseholderQR<Mat> qr(C.transpose());
      qr.setThreshold(kRankThreshold);
      return static_cast<long>(qr.rank());
    };
    for (int j = 0; j < m_in; ++j) {
      if (poly_.G.row(j).dot(x) - poly_.h(j) >= -act_tol) {
        work.push_back(j);
        if (stacked_rank(work) < static_cast<long>(m_eq + work.size()))
          work.pop_back();
      }
    }
  }

  std::vector<double> step_history;
  Result res;
  for (int iter = 1; iter <= max_iter_; ++iter) {
    res.iterations = iter;
    Mat C(m_eq + work.size(), n);
    Vec d(m_eq + work.size());
    if (m_eq > 0) {
      C.topRows(m_eq) = poly_.A;
      d.head(m_eq) = poly_.b;
    }
    for (size_t k = 0; k < work.size(); ++k) {
      C.row(m_eq + static_cast<int>(k)) = poly_.G.row(work[k]);
      d(m_eq + static_cast<int>(k)) = poly_.h(work[k]);
    }
    EqQpResult eq = solve_eq_qp(H, c, C, d);
    const Vec p = eq.x - x;
    const double pnorm = p.lpNorm<Eigen::Infinity>();
    step_history.push_back(pnorm);

    if (pnorm <= tol_ * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      // Stationary on the working set; check the multipliers.
      int drop = -1;
      for (size_t k = 0; k < work.size(); ++k) {
        if (eq.duals(m_eq + static_cast<int>(k)) < -tol_) {
          drop = static_cast<int>(k);
          break;  // lowest constraint index leaves
        }
      }
      if (drop < 0) {
        res.x = eq.x;
        res.eq_duals = eq.duals.head(m_eq);
        res.ineq_duals = Vec::Zero(orig_ineq_);
        for (size_t k = 0; k < work.size(); ++k)
          res.ineq_duals(row_map_[work[k]]) =
              std::max(0.0, eq.duals(m_eq + static_cast<int>(k)));
        res.working_set.clear();
        for (int w : work) res.working_set.push_back(row_map_[w]);
        Vec stat = H * res.x + c;
        if (m_eq > 0) stat += poly_.A.transpose() * res.eq_duals;
        for (size_t k = 0; k < work.size(); ++k)
          stat += poly_.G.row(work[k]).transpose() *
                  eq.duals(m_eq + static_cast<int>(k));
        res.kkt_residual = stat.lpNorm<Eigen::Infinity>();
        warm_ = res.x;
        return res;
      }
      work.erase(work.begin() + drop);
      continue;
    }

    // Ratio test against the inactive rows; Bland-style lowest index enters.
    double alpha = 1.0;
    int blocker = -1;
    for (int j = 0; j < m_in; ++j) {
      if (std::find(work.begin(), work.end(), j) != work.end()) continue;
      const double dir = poly_.G.row(j).dot(p);
      if (dir <= tol_) continue;
      const double gap = poly_.h(j) - poly_.G.row(j).dot(x);
      const double aj = std::max(0.0, gap / dir);
      if (aj < alpha - 1e-12 || (blocker < 0 && aj < alpha)) {
        alpha = aj;  // ties keep the first (lowest) index
        blocker = j;
      }
    }
    x += alpha * p;
    if (blocker >= 0 && alpha < 1.0) work.push_back(blocker);
  }
  throw NonconvergenceError("ActiveSetQp: working-set iteration cap " +
                                std::to_string(max_iter_) + " exceeded",
                            step_history);
}

ActiveSetQp::Result ActiveSetQp::project(const Vec& z) {
  const int n = poly_.dim();
  if (z.size() != n) throw DimensionError("project: point dimension mismatch");
  return minimize(Mat::Identity(n, n), -z);
}

ProjectionResult project_polyhedron(const Vec& z, const Polyhedron& X,
                                    double tol) {
  ActiveSetQp solver(X, tol);
  ActiveSetQp::Result r = solver.project(z);
  ProjectionResult out;
  out.point = std::move(r.x);
  out.eq_duals = std::move(r.eq_duals);
  out.ineq_duals = std::move(r.ineq_duals);
  out.iterations = r.iterations;
  out.kkt_residual = r.kkt_residual;
  return out;
}

}  // namespace spg
