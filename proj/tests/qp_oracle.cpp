#include "qp_oracle.hpp"

#include <Eigen/Dense>
#include <limits>

#include "spg/errors.hpp"

namespace spg::testing {

Vec dense_qp_reference(const Mat& H, const Vec& c, const Mat& A, const Vec& b,
                       const Mat& G, const Vec& h) {
  const int n = static_cast<int>(H.rows());
  const int me = static_cast<int>(A.rows());
  const int mi = static_cast<int>(G.rows());
  if (mi > 12)
    throw Error("dense_qp_reference enumerates at most 12 inequality rows, got " +
                std::to_string(mi));

  const double scale = std::max({1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0,
                                 h.size() ? h.cwiseAbs().maxCoeff() : 0.0});
  const double feas_tol = 1e-8 * scale;
  const double dual_tol = 1e-8;

  double best = std::numeric_limits<double>::infinity();
  Vec best_x;
  bool found = false;

  for (unsigned mask = 0; mask < (1u << mi); ++mask) {
    std::vector<int> sel;
    for (int j = 0; j < mi; ++j)
      if (mask & (1u << j)) sel.push_back(j);
    const int k = me + static_cast<int>(sel.size());

    Mat K = Mat::Zero(n + k, n + k);
    K.topLeftCorner(n, n) = H;
    Vec rhs(n + k);
    rhs.head(n) = -c;
    for (int e = 0; e < me; ++e) {
      K.block(n + e, 0, 1, n) = A.row(e);
      K.block(0, n + e, n, 1) = A.row(e).transpose();
      rhs(n + e) = b(e);
    }
    for (size_t s = 0; s < sel.size(); ++s) {
      const int row = n + me + static_cast<int>(s);
      K.block(row, 0, 1, n) = G.row(sel[s]);
      K.block(0, row, n, 1) = G.row(sel[s]).transpose();
      rhs(row) = h(sel[s]);
    }

    Eigen::FullPivLU<Mat> lu(K);
    if (!lu.isInvertible()) continue;
    const Vec sol = lu.solve(rhs);
    const Vec x = sol.head(n);

    if (me > 0 && (A * x - b).cwiseAbs().maxCoeff() > feas_tol) continue;
    if (mi > 0 && (G * x - h).maxCoeff() > feas_tol) continue;
    bool dual_ok = true;
    for (size_t s = 0; s < sel.size(); ++s)
      if (sol(n + me + static_cast<int>(s)) < -dual_tol) dual_ok = false;
    if (!dual_ok) continue;

    const double val = 0.5 * x.dot(H * x) + c.dot(x);
    if (!found || val < best) {
      best = val;
      best_x = x;
      found = true;
    }
  }

  if (!found)
    throw InfeasibleError("dense_qp_reference: no KKT-consistent active set");
  return best_x;
}

}  // namespace spg::testing
