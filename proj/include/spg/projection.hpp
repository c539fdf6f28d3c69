#pragma once

#include <optional>
#include <vector>

#include "spg/types.hpp"

namespace spg {

// {x : A x = b, G x <= h}; either block may have zero rows.
struct Polyhedron {
  Mat A;
  Vec b;
  Mat G;
  Vec h;

  int dim() const { return static_cast<int>(std::max(A.cols(), G.cols())); }
  int num_eq() const { return static_cast<int>(A.rows()); }
  int num_ineq() const { return static_cast<int>(G.rows()); }

  static Polyhedron of(const FollowerSpec& f) { return {f.A, f.b, f.G, f.h}; }

  bool contains(const Vec& x, double tol) const;
};

// Elementwise clamp onto [lo, hi]. Throws Error when lo_j > hi_j.
Vec project_box(const Vec& z, const Vec& lo, const Vec& hi);

// Solves the saddle system [H C'; C 0][x; nu] = [-c; d] for H > 0 and C full
// row rank (rank checked first, RankError otherwise). C may have zero rows.
struct EqQpResult {
  Vec x;
  Vec duals;       // one per row of C
  double residual; // inf-norm of the saddle system residual
};
EqQpResult solve_eq_qp(const Mat& H, const Vec& c, const Mat& C, const Vec& d);

// Primal active-set solver for min 1/2 x'H x + c'x over a polyhedron, H > 0.
// One instance per polyhedron; it caches the last solution as the next warm
// start, so consecutive nearby solves (the Picard sweep, Armijo trials) cost
// one or two working-set iterations. Not thread-safe across solves; clone per
// thread instead.
class ActiveSetQp {
public:
  struct Result {
    Vec x;
    Vec eq_duals;                 // per equality row
    Vec ineq_duals;               // per inequality row, zero when inactive
    std::vector<int> working_set; // final active inequality rows
    int iterations = 0;
    double kkt_residual = 0.0;
  };

  ActiveSetQp(Polyhedron poly, double tol = 1e-9);

  Result minimize(const Mat& H, const Vec& c);

  // Convenience for the projection QP min 1/2 ||y - z||^2.
  Result project(const Vec& z);

  const Polyhedron& polyhedron() const { return poly_; }
  void set_warm_start(const Vec& x) { warm_ = x; }

private:
  Vec feasible_start();

  Polyhedron poly_;        // deduplicated rows
  std::vector<int> row_map_;  // deduplicated row -> original row
  int orig_ineq_ = 0;
  double tol_;
  int max_iter_;
  std::optional<Vec> warm_;
};

// One-shot exact Euclidean projection onto X. Returns the projected point and
// the projection QP duals (equality duals first, then one per inequality row).
struct ProjectionResult {
  Vec point;
  Vec eq_duals;
  Vec ineq_duals;
  int iterations = 0;
  double kkt_residual = 0.0;
};
ProjectionResult project_polyhedron(const Vec& z, const Polyhedron& X,
                                    double tol = 1e-9);

}  // namespace spg
