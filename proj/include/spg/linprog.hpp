#pragma once

#include "spg/types.hpp"

namespace spg {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
};

// maximize c'x  subject to  Aeq x = beq, G x <= h, x free.
// Dense two-phase simplex with Bland's rule; meant for the small polyhedra
// this library works with, not for large-scale LP.
LpResult solve_lp(const Vec& c, const Mat& Aeq, const Vec& beq, const Mat& G,
                  const Vec& h);

// Certificate of (strict) feasibility for {x : A x = b, G x <= h}, obtained
// by maximizing the slack margin t over G x <= h - t*1 (t capped at 1 so the
// LP stays bounded). margin > 0 certifies a Slater point; margin in
// [-tol, 0] means feasible but with empty interior of the inequalities.
struct SlaterCertificate {
  bool feasible = false;
  double margin = 0.0;  // +inf when there are no inequality rows
  Vec point;            // valid when feasible
};
SlaterCertificate slater_point(const Mat& A, const Vec& b, const Mat& G,
                               const Vec& h);

// Boundedness of {x : A x = b, G x <= h} via 2n support LPs max +-e_j'x.
// The empty set counts as bounded.
struct BoundednessCheck {
  bool bounded = true;
  int axis = -1;       // offending axis when unbounded
  int direction = 0;   // +1 or -1
};
BoundednessCheck check_bounded(const Mat& A, const Vec& b, const Mat& G,
                               const Vec& h, int dim);

}  // namespace spg
