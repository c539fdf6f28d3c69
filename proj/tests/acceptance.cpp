// Acceptance gate: one [PASS]/[FAIL] line per shipped guarantee. Exit code 0
// only when every criterion holds. Run time of the whole binary is bounded by
// the slowest criterion (the grid baseline, < 10 min).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "spg/errors.hpp"
#include "spg/fd.hpp"
#include "spg/gridsearch.hpp"
#include "spg/io.hpp"
#include "spg/leader.hpp"
#include "spg/nash.hpp"
#include "spg/projection.hpp"
#include "spg/sensitivity.hpp"
#include "spg/validation.hpp"
#include "test_support.hpp"

using namespace spg;

namespace {

struct CheckFailure {
  std::string what;
};

#define REQUIRE(cond, msg)                                              \
  do {                                                                  \
    if (!(cond)) {                                                      \
      std::ostringstream os_;                                           \
      os_ << __FILE__ << ":" << __LINE__ << " " << msg;                 \
      throw CheckFailure{os_.str()};                                    \
    }                                                                   \
  } while (0)

int g_failures = 0;

void criterion(const std::string& name, const std::function<void()>& body) {
  using clock = std::chrono::steady_clock;
  const auto tic = clock::now();
  try {
    body();
    const double secs =
        std::chrono::duration<double>(clock::now() - tic).count();
    std::printf("[PASS] %s (%.1f s)\n", name.c_str(), secs);
  } catch (const CheckFailure& f) {
    ++g_failures;
    std::printf("[FAIL] %s\n       %s\n", name.c_str(), f.what.c_str());
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("[FAIL] %s\n       unexpected exception: %s\n", name.c_str(),
                e.what());
  }
  std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& tic) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - tic)
      .count();
}

// Shared fixtures -----------------------------------------------------------

constexpr double kEps = 1e-8;  // follower fixed-point tolerance everywhere

// G2 plus 100 random validated games, each with a price to solve at.
std::vector<std::pair<PricingGame, Vec>> g_corpus;

// Instances that passed the Jacobian screen, kept for the structure checks.
std::vector<std::tuple<PricingGame, Vec, NashResult>> g_stable;

// Traces produced by the descent criteria, re-validated step by step at the
// end. Each entry carries everything needed to replay its accepted steps.
struct TraceCase {
  std::string name;
  PricingGame game;
  double delta = 0.0;
  StackelbergResult result;
};
std::vector<TraceCase> g_traces;

void build_corpus() {
  std::mt19937_64 rng(20240817);
  Vec pi_g2(2);
  pi_g2 << 1, 0;
  g_corpus.emplace_back(testing::g2_game(), pi_g2);
  while (g_corpus.size() < 101) {
    PricingGame game = testing::random_game(rng);
    Vec pi = testing::random_price(rng, game);
    g_corpus.emplace_back(std::move(game), std::move(pi));
  }
}

// Criteria ------------------------------------------------------------------

void nash_certification() {
  const auto tic = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  NashConfig cfg;
  cfg.eps = kEps;
  for (const auto& [game, pi] : g_corpus) {
    const NashResult a = solve_nash(game, pi, cfg, testing::random_start(rng, game));
    const NashResult b = solve_nash(game, pi, cfg, testing::random_start(rng, game));
    const NashVerification check = verify_nash(game, a.x, pi);
    REQUIRE(check.worst_deviation <= 1e-6,
            "best-response deviation " << check.worst_deviation);
    const double gap = (a.x.stacked() - b.x.stacked()).norm();
    REQUIRE(gap <= 2 * kEps, "two starts disagree by " << gap);
  }
  const double secs = seconds_since(tic);
  REQUIRE(secs < 30.0, "certification took " << secs << " s");
}

void contraction_ratio() {
  NashConfig cfg;
  cfg.eps = kEps;
  for (const auto& [game, pi] : g_corpus) {
    const ContractionParams cp = contraction_params(game);
    REQUIRE(cp.q < 1.0, "contraction factor " << cp.q);
    const NashResult res = solve_nash(game, pi, cfg);
    const auto& hist = res.residual_history;
    for (size_t k = 1; k < hist.size(); ++k) {
      if (hist[k - 1] <= 1e-13) continue;  // at rounding noise
      REQUIRE(hist[k] / hist[k - 1] <= cp.q + 1e-6,
              "ratio " << hist[k] / hist[k - 1] << " vs q " << cp.q
                       << " at sweep " << k);
    }
  }
}

void g2_equilibria() {
  const PricingGame game = testing::g2_game();
  NashConfig cfg;
  cfg.eps = kEps;

  Vec pi = Vec::Zero(2);
  NashResult res = solve_nash(game, pi, cfg);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(std::abs(res.x.block(i)(0) - 0.5) <= kEps &&
                std::abs(res.x.block(i)(1) - 0.5) <= kEps,
            "NE at the zero price is not the symmetric split");
  }

  pi << 1, 0;
  res = solve_nash(game, pi, cfg);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(std::abs(res.x.block(i)(0) - 1.0 / 3) <= 1e-6 &&
                std::abs(res.x.block(i)(1) - 2.0 / 3) <= 1e-6,
            "NE at pi=[1,0] is off: " << res.x.block(i).transpose());
  }
}

void jacobian_fd_agreement() {
  NashConfig ncfg;
  ncfg.eps = 1e-12;
  SensitivityConfig scfg;
  scfg.nash_eps = ncfg.eps;

  // Reference game first, against the known closed form.
  {
    const PricingGame game = testing::g2_game();
    Vec pi(2);
    pi << 1, 0;
    const NashResult nash = solve_nash(game, pi, ncfg);
    const auto sens = game_jacobians(game, nash.x, pi, scfg);
    Mat expect(2, 2);
    expect << -0.25, 0.25, 0.25, -0.25;
    for (int i = 0; i < 2; ++i) {
      const auto& f = game.followers[static_cast<size_t>(i)];
      const Mat fd = fd_jacobian(f, nash.x.aggregate_excluding(i), pi);
      REQUIRE((sens[static_cast<size_t>(i)].jacobian - expect)
                      .cwiseAbs()
                      .maxCoeff() <= 1e-7,
              "assembled Jacobian off the closed form");
      REQUIRE((fd - sens[static_cast<size_t>(i)].jacobian)
                      .cwiseAbs()
                      .maxCoeff() <= 1e-5,
              "finite differences disagree on the reference game");
    }
  }

  std::mt19937_64 rng(22);
  g_stable.clear();
  int instances = 0;
  int draws = 0;
  while (instances < 100) {
    REQUIRE(++draws < 1000, "too many unstable draws");
    const PricingGame game = testing::random_game(rng);
    const Vec pi = testing::random_price(rng, game);
    const NashResult nash = solve_nash(game, pi, ncfg);
    bool usable = true;
    double worst = 0.0;
    try {
      const auto sens = game_jacobians(game, nash.x, pi, scfg);
      for (int i = 0; i < game.num_followers(); ++i) {
        const auto& f = game.followers[static_cast<size_t>(i)];
        const Mat fd = fd_jacobian(f, nash.x.aggregate_excluding(i), pi);
        worst = std::max(
            worst,
            (fd - sens[static_cast<size_t>(i)].jacobian).cwiseAbs().maxCoeff());
      }
    } catch (const RankError&) {
      usable = false;  // degenerate vertex: the equilibrium map has a kink
    } catch (const UnreliableStencilError&) {
      usable = false;  // a constraint activates inside the stencil
    }
    if (!usable) continue;
    REQUIRE(worst <= 1e-5, "Jacobian mismatch " << worst);
    ++instances;
    g_stable.emplace_back(game, pi, nash);
  }
}

void kkt_structure() {
  REQUIRE(!g_stable.empty(), "no stable instances were collected");
  SensitivityConfig scfg;
  scfg.nash_eps = 1e-12;
  for (const auto& [game, pi, nash] : g_stable) {
    for (int i = 0; i < game.num_followers(); ++i) {
      const FollowerSpec& f = game.followers[static_cast<size_t>(i)];
      const ActiveSetInfo info =
          detect_active_set(f, nash.x.block(i), scfg.tau_act);
      const EquivalentProblem eq = build_equivalent_problem(f, info);
      if (eq.G_inact.rows() > 0) {
        const Vec margins = eq.G_inact * nash.x.block(i) - eq.h_inact;
        REQUIRE(margins.maxCoeff() < 0.0,
                "inactive margin " << margins.maxCoeff() << " not negative");
      }
      if (eq.A_bar.rows() > 0) {
        const Mat schur =
            -eq.A_bar * f.P.llt().solve(Mat(eq.A_bar.transpose()));
        const Eigen::SelfAdjointEigenSolver<Mat> es(
            0.5 * (schur + schur.transpose()));
        REQUIRE(es.eigenvalues().maxCoeff() < 0.0,
                "pinned-row Schur factor not negative definite");
      }
      const SensitivityResult sens = follower_jacobian(
          f, nash.x.block(i), nash.x.aggregate_excluding(i), pi, scfg);
      REQUIRE(sens.kkt_condition < 1e12,
              "KKT condition number " << sens.kkt_condition);
    }
  }
}

void price_shift_invariance() {
  std::mt19937_64 rng(33);
  testing::RandomGameOptions opt;
  opt.shift_invariant = true;
  NashConfig cfg;
  cfg.eps = kEps;
  const double alphas[] = {-1.0, 0.7, 3.0};
  for (int t = 0; t < 20; ++t) {
    const PricingGame game = testing::random_game(rng, opt);
    const Vec pi = testing::random_price(rng, game);
    const NashResult base = solve_nash(game, pi, cfg);
    Vec v(game.price_dim());
    for (int k = 0; k < v.size(); ++k)
      v(k) = 1.0 / game.followers[0].S(k, k);
    for (const double alpha : alphas) {
      const NashResult shifted = solve_nash(game, pi + alpha * v, cfg);
      const double gap = (base.x.stacked() - shifted.x.stacked()).norm();
      REQUIRE(gap <= 2 * kEps,
              "equilibrium moved by " << gap << " under alpha " << alpha);
    }
  }
}

void leader_convergence() {
  const auto tic = std::chrono::steady_clock::now();
  const PricingGame game = testing::g2_game();
  NashConfig ncfg;
  ncfg.eps = kEps;
  LeaderConfig cfg;
  cfg.beta = 0.25;
  cfg.s_bar = 1e-2;
  cfg.max_outer = 20000;

  const StackelbergResult res =
      solve_stackelberg(game, Vec::Zero(2), ncfg, cfg);
  REQUIRE(res.termination == "stationary",
          "terminated with '" << res.termination << "'");
  const auto& rows = res.trace.rows;
  REQUIRE(rows.size() >= 2, "trace too short");
  for (size_t t = 1; t < rows.size(); ++t) {
    REQUIRE(rows[t].JL <=
                rows[t - 1].JL + 1e-12 * std::max(1.0, std::abs(rows[t - 1].JL)),
            "leader value increased at step " << t);
  }
  const double tail = std::abs(rows.back().JL - rows[rows.size() - 2].JL);
  REQUIRE(tail < 1e-10, "terminal value change " << tail);
  REQUIRE(res.value <= 1e-8, "final leader value " << res.value);
  const double secs = seconds_since(tic);
  REQUIRE(secs < 60.0, "descent took " << secs << " s");

  g_traces.push_back({"tracking-descent", game, cfg.delta, res});
}

void grid_vs_descent() {
  const auto tic = std::chrono::steady_clock::now();
  const GameFile doc =
      parse_game_file(std::string(SPG_DATA_DIR) + "/charging.json");
  NashConfig ncfg;
  ncfg.eps = kEps;

  const GridResult grid = grid_search(doc.game, 11, ncfg);
  REQUIRE(grid.total_points == 14641, "unexpected lattice size");
  REQUIRE(grid.best().value > 0.0, "grid already at the optimum");

  LeaderConfig cfg;  // stock step sizes
  const StackelbergResult res =
      solve_stackelberg(doc.game, grid.best().pi, ncfg, cfg);
  REQUIRE(res.value < grid.best().value,
          "descent value " << res.value << " does not beat the grid's "
                           << grid.best().value);
  const double secs = seconds_since(tic);
  REQUIRE(secs < 600.0, "grid plus descent took " << secs << " s");

  g_traces.push_back({"grid-seeded-descent", doc.game, cfg.delta, res});
}

void seed_dependence() {
  const GameFile doc =
      parse_game_file(std::string(SPG_DATA_DIR) + "/charging.json");
  NashConfig ncfg;
  ncfg.eps = kEps;
  LeaderConfig cfg;
  cfg.s_bar = 1e-5;
  cfg.stat_tol = 1e-8;
  cfg.max_outer = 10000;

  // The two documented starts: one corner price funnels every fleet onto
  // station 1 and is already stationary; the flat start descends to a far
  // better tracking value.
  Vec seed_corner(4), seed_flat(4);
  seed_corner << 1, 5, 5, 5;
  seed_flat << 3, 3, 3, 3;

  const StackelbergResult corner =
      solve_stackelberg(doc.game, seed_corner, ncfg, cfg);
  const StackelbergResult flat =
      solve_stackelberg(doc.game, seed_flat, ncfg, cfg);

  for (const auto* res : {&corner, &flat}) {
    REQUIRE(res->termination == "stationary",
            "terminated with '" << res->termination << "'");
    const auto& rows = res->trace.rows;
    for (size_t t = 1; t < rows.size(); ++t)
      REQUIRE(rows[t].JL <= rows[t - 1].JL +
                                1e-12 * std::max(1.0, std::abs(rows[t - 1].JL)),
              "nonmonotone trace at step " << t);
  }
  const double hi = std::max(corner.value, flat.value);
  const double lo = std::min(corner.value, flat.value);
  REQUIRE(hi > 10.0 * std::max(lo, 1e-300),
          "values " << corner.value << " and " << flat.value
                    << " differ by less than 10x");

  g_traces.push_back({"corner-seed", doc.game, cfg.delta, corner});
  g_traces.push_back({"flat-seed", doc.game, cfg.delta, flat});
}

void armijo_certificates() {
  REQUIRE(!g_traces.empty(), "no traces were produced");
  NashConfig ncfg;
  ncfg.eps = 1e-10;  // re-validation solves are colder and tighter
  long steps_checked = 0;
  for (const auto& tc : g_traces) {
    const auto& rows = tc.result.trace.rows;
    // Recompute the leader value at every trace price from scratch.
    std::vector<double> J(rows.size());
    for (size_t t = 0; t < rows.size(); ++t) {
      const NashResult nash = solve_nash(tc.game, rows[t].pi, ncfg);
      J[t] = tc.game.objective->value(nash.x, rows[t].pi);
      REQUIRE(std::abs(J[t] - rows[t].JL) <=
                  1e-7 * std::max(1.0, std::abs(rows[t].JL)),
              tc.name << ": trace value drifts at step " << t << " ("
                      << rows[t].JL << " vs " << J[t] << ")");
    }
    for (size_t t = 0; t + 1 < rows.size(); ++t) {
      if (rows[t].step <= 0.0) continue;  // stationary row: no step taken
      const Vec expected = project_box(
          rows[t].pi - rows[t].step * rows[t].gradient, tc.game.price_lo,
          tc.game.price_hi);
      REQUIRE((expected - rows[t + 1].pi).norm() <= 1e-12,
              tc.name << ": step " << t << " is not the projected trial");
      const double rhs =
          tc.delta * rows[t].gradient.dot(rows[t].pi - rows[t + 1].pi);
      const double slack = 1e-9 * std::max(1.0, std::abs(J[t])) + 1e-12;
      REQUIRE(J[t] - J[t + 1] >= rhs - slack,
              tc.name << ": decrease " << (J[t] - J[t + 1])
                      << " misses the certificate " << rhs << " at step " << t);
      ++steps_checked;
    }
  }
  REQUIRE(steps_checked > 0, "no accepted steps to certify");
}

}  // namespace

int main() {
  build_corpus();
  criterion("nash-certification", nash_certification);
  criterion("contraction-ratio", contraction_ratio);
  criterion("reference-equilibria", g2_equilibria);
  criterion("jacobian-fd-agreement", jacobian_fd_agreement);
  criterion("kkt-structure", kkt_structure);
  criterion("price-shift-invariance", price_shift_invariance);
  criterion("leader-convergence", leader_convergence);
  criterion("grid-vs-descent", grid_vs_descent);
  criterion("seed-dependence", seed_dependence);
  criterion("armijo-certificates", armijo_certificates);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
