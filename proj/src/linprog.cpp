#include "spg/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spg/errors.hpp"

namespace spg {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-8;

// Dense simplex tableau over columns [u v s | artificials], u - v = x.
// Rows are scaled to unit max coefficient when built.
struct Tableau {
  Mat rows;          // m x n_tot
  Vec rhs;           // m, kept nonnegative
  std::vector<int> basis;
  int n_tot = 0;
  int n_struct = 0;  // columns before the artificial block

  int m() const { return static_cast<int>(rows.rows()); }

  void pivot(int r, int c) {
    const double p = rows(r, c);
    rows.row(r) /= p;
    rhs(r) /= p;
    for (int i = 0; i < m(); ++i) {
      if (i == r) continue;
      const double f = rows(i, c);
      if (f != 0.0) {
        rows.row(i) -= f * rows.row(r);
        rhs(i) -= f * rhs(r);
      }
    }
    basis[r] = c;
  }

  void drop_row(int r) {
    const int last = m() - 1;
    if (r != last) {
      rows.row(r) = rows.row(last);
      rhs(r) = rhs(last);
      basis[r] = basis[last];
    }
    rows.conservativeResize(last, Eigen::NoChange);
    rhs.conservativeResize(last);
    basis.resize(last);
  }
};

// One simplex phase, maximizing cost'columns. allow_artificial gates whether
// artificial columns may enter. Bland's rule on both the entering column and
// the leaving variable, so the loop cannot cycle.
LpStatus run_phase(Tableau& t, const Vec& cost, bool allow_artificial) {
  const int cap = 400 + 40 * t.n_tot;
  for (int iter = 0; iter < cap; ++iter) {
    // Reduced costs from scratch; the tableau is tiny and this avoids drift.
    Vec red = cost;
    for (int r = 0; r < t.m(); ++r) {
      const double cb = cost(t.basis[r]);
      if (cb != 0.0) red -= cb * t.rows.row(r).transpose();
    }
    int enter = -1;
    const int limit = allow_artificial ? t.n_tot : t.n_struct;
    for (int j = 0; j < limit; ++j) {
      if (red(j) > kPivotTol) {
        enter = j;
        break;  // Bland: lowest improving index
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < t.m(); ++r) {
      const double a = t.rows(r, enter);
      if (a > kPivotTol) {
        const double ratio = t.rhs(r) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (leave < 0 || t.basis[r] < t.basis[leave]))) {
          best_ratio = ratio;
          leave = r;
        }
      }
    }
    if (leave < 0) return LpStatus::Unbounded;
    t.pivot(leave, enter);
  }
  throw NonconvergenceError("simplex: iteration cap exceeded", {});
}

}  // namespace

LpResult solve_lp(const Vec& c, const Mat& Aeq, const Vec& beq, const Mat& G,
                  const Vec& h) {
  const int n = static_cast<int>(c.size());
  const int m_e = static_cast<int>(Aeq.rows());
  const int m_i = static_cast<int>(G.rows());
  const int m = m_e + m_i;
  if (m == 0) {
    LpResult out;
    out.x = Vec::Zero(n);
    if (c.lpNorm<Eigen::Infinity>() > 0) {
      out.status = LpStatus::Unbounded;
    } else {
      out.status = LpStatus::Optimal;
    }
    return out;
  }

  Tableau t;
  t.n_struct = 2 * n + m_i;
  t.n_tot = t.n_struct + m;
  t.rows = Mat::Zero(m, t.n_tot);
  t.rhs = Vec::Zero(m);
  t.basis.resize(m);

  for (int r = 0; r < m; ++r) {
    Vec row_x = (r < m_e) ? Vec(Aeq.row(r)) : Vec(G.row(r - m_e));
    double rv = (r < m_e) ? beq(r) : h(r - m_e);
    double scale = std::max(row_x.lpNorm<Eigen::Infinity>(), std::abs(rv));
    if (scale < 1e-300) scale = 1.0;
    row_x /= scale;
    rv /= scale;
    double sign = (rv < 0.0) ? -1.0 : 1.0;
    t.rows.block(r, 0, 1, n) = sign * row_x.transpose();
    t.rows.block(r, n, 1, n) = -sign * row_x.transpose();
    if (r >= m_e) t.rows(r, 2 * n + (r - m_e)) = sign;
    t.rows(r, t.n_struct + r) = 1.0;
    t.rhs(r) = sign * rv;
    t.basis[r] = t.n_struct + r;
  }

  // Phase 1: drive the artificials to zero.
  Vec cost1 = Vec::Zero(t.n_tot);
  cost1.tail(m).setConstant(-1.0);
  if (run_phase(t, cost1, true) != LpStatus::Optimal)
    throw NonconvergenceError("simplex phase 1 reported unbounded", {});
  double art_sum = 0.0;
  for (int r = 0; r < t.m(); ++r)
    if (t.basis[r] >= t.n_struct) art_sum += t.rhs(r);
  if (art_sum > kFeasTol) {
    LpResult out;
    out.status = LpStatus::Infeasible;
    return out;
  }
  // Pivot remaining zero-level artificials out, or drop redundant rows.
  for (int r = t.m() - 1; r >= 0; --r) {
    if (t.basis[r] < t.n_struct) continue;
    int col = -1;
    for (int j = 0; j < t.n_struct; ++j) {
      if (std::abs(t.rows(r, j)) > 1e-7) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      t.pivot(r, col);
    } else {
      t.drop_row(r);
    }
  }

  // Phase 2 on the true objective, artificial columns locked out.
  const double cscale = std::max(1.0, c.lpNorm<Eigen::Infinity>());
  Vec cost2 = Vec::Zero(t.n_tot);
  cost2.head(n) = c / cscale;
  cost2.segment(n, n) = -c / cscale;
  const LpStatus st = run_phase(t, cost2, false);

  LpResult out;
  out.status = st;
  if (st == LpStatus::Optimal) {
    Vec vals = Vec::Zero(t.n_tot);
    for (int r = 0; r < t.m(); ++r) vals(t.basis[r]) = t.rhs(r);
    out.x = vals.head(n) - vals.segment(n, n);
    out.objective = c.dot(out.x);
  }
  return out;
}

SlaterCertificate slater_point(const Mat& A, const Vec& b, const Mat& G,
                               const Vec& h) {
  SlaterCertificate cert;
  const int n = static_cast<int>(std::max(A.cols(), G.cols()));
  if (G.rows() == 0) {
    // Only equalities: feasibility is consistency of A x = b.
    Vec c = Vec::Zero(n);
    LpResult lp = solve_lp(c, A, b, Mat(0, n), Vec(0));
    cert.feasible = lp.status == LpStatus::Optimal;
    cert.margin = std::numeric_limits<double>::infinity();
    if (cert.feasible) cert.point = lp.x;
    return cert;
  }
  // Variables (x, t): maximize t s.t. A x = b, G x + t*1 <= h, t <= 1.
  const int m_i = static_cast<int>(G.rows());
  Vec c = Vec::Zero(n + 1);
  c(n) = 1.0;
  Mat Aeq(A.rows(), n + 1);
  if (A.rows() > 0) {
    Aeq.leftCols(n) = A;
    Aeq.col(n).setZero();
  }
  Mat Gt(m_i + 1, n + 1);
  Gt.block(0, 0, m_i, n) = G;
  Gt.block(0, n, m_i, 1).setOnes();
  Gt.row(m_i).setZero();
  Gt(m_i, n) = 1.0;
  Vec ht(m_i + 1);
  ht.head(m_i) = h;
  ht(m_i) = 1.0;
  LpResult lp = solve_lp(c, Aeq, b, Gt, ht);
  if (lp.status != LpStatus::Optimal) return cert;  // A x = b inconsistent
  cert.margin = lp.x(n);
  cert.feasible = cert.margin >= -kFeasTol;
  if (cert.feasible) cert.point = lp.x.head(n);
  return cert;
}

BoundednessCheck check_bounded(const Mat& A, const Vec& b, const Mat& G,
                               const Vec& h, int dim) {
  BoundednessCheck out;
  for (int j = 0; j < dim; ++j) {
    for (int sgn : {+1, -1}) {
      Vec c = Vec::Zero(dim);
      c(j) = sgn;
      LpResult lp = solve_lp(c, A, b, G, h);
      if (lp.status == LpStatus::Unbounded) {
        out.bounded = false;
        out.axis = j;
        out.direction = sgn;
        return out;
      }
    }
  }
  return out;
}

}  // namespace spg
