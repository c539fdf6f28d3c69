#pragma once

#include <string>
#include <vector>

#include "spg/types.hpp"

namespace spg {

struct SensitivityConfig {
  // Tolerance classifying a row g_j'x <= h_j as active: |g_j'x - h_j| <=
  // tau_act. Must dominate the Nash tolerance by a decade so equilibrium
  // noise cannot flip the classification.
  double tau_act = 1e-6;
  double nash_eps = 1e-8;
  void check() const;
};

struct ActiveSetInfo {
  std::vector<int> active;    // tight rows of G x <= h
  std::vector<int> inactive;  // strictly slack rows
  double tolerance = 0.0;
  double worst_violation = 0.0;   // max_j (g_j'x - h_j), <= tolerance
  double closest_inactive = 0.0;  // min inactive slack h_j - g_j'x
};

ActiveSetInfo detect_active_set(const FollowerSpec& follower, const Vec& x,
                                double tau_act);

// The equality-pinned problem in which every active inequality row is moved
// into the equality block.
struct EquivalentProblem {
  Mat A_bar;  // [A; active rows of G], exact duplicates pruned
  Vec b_bar;
  Mat G_inact;
  Vec h_inact;
  std::vector<int> active_rows;    // original G row per retained A_bar tail row
  std::vector<int> inactive_rows;  // original G row per G_inact row
  int rank = 0;
};

EquivalentProblem build_equivalent_problem(const FollowerSpec& follower,
                                           const ActiveSetInfo& info);

struct DualRecovery {
  Vec nu_bar;              // multipliers of A_bar rows
  double residual = 0.0;   // stationarity defect of the least-squares fit
};

// Recovers multipliers from stationarity P x + Q sigma + r + S pi + A_bar'nu
// = 0. Inactive-row multipliers are identically zero and are not returned.
DualRecovery recover_duals(const FollowerSpec& follower,
                           const EquivalentProblem& eq, const Vec& x,
                           const Vec& sigma_others, const Vec& pi);

struct KktSystem {
  Mat D_z;   // square Jacobian of the KKT residual in (x, lambda_inact, nu)
  Mat D_pi;  // price Jacobian of the KKT residual
  double condition = 0.0;
  std::vector<std::string> warnings;
};

KktSystem assemble_kkt_system(const FollowerSpec& follower,
                              const EquivalentProblem& eq, const Vec& x,
                              const Vec& nu_bar);

struct SensitivityResult {
  Mat jacobian;  // D_pi x^{i*}, m_F x m_L
  Vec nu_bar;
  Vec lambda;  // full-length multipliers; inactive entries exactly zero
  ActiveSetInfo active_set;
  int rank_A_bar = 0;
  double kkt_condition = 0.0;
  double stationarity_residual = 0.0;
  std::vector<int> weakly_active;  // active rows whose multiplier ~ 0
  std::vector<std::string> warnings;
};

// Full pipeline for one follower: classify the active set at x^{i*}, pin it,
// recover duals, and differentiate the reduced KKT system in pi.
SensitivityResult follower_jacobian(const FollowerSpec& follower, const Vec& x,
                                    const Vec& sigma_others, const Vec& pi,
                                    const SensitivityConfig& cfg = {});

// Per-follower Jacobians at a joint equilibrium.
std::vector<SensitivityResult> game_jacobians(const PricingGame& game,
                                              const JointStrategy& x,
                                              const Vec& pi,
                                              const SensitivityConfig& cfg = {});

}  // namespace spg
