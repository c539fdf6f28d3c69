#include <doctest.h>

#include <random>

#include "spg/errors.hpp"
#include "spg/game.hpp"
#include "spg/validation.hpp"
#include "test_support.hpp"

using namespace spg;
using testing::g2_game;

namespace {

JointStrategy joint(const Vec& x1, const Vec& x2) {
  return JointStrategy({x1, x2});
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("pseudo_gradient matches hand arithmetic on the reference game") {
  const PricingGame game = g2_game();

  SUBCASE("symmetric point, zero price") {
    const Vec g = pseudo_gradient(game, joint(v2(0.5, 0.5), v2(0.5, 0.5)),
                                  Vec::Zero(2));
    Vec expect(4);
    expect << 1.5, 1.5, 1.5, 1.5;
    CHECK((g - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }

  SUBCASE("asymmetric point") {
    const Vec g =
        pseudo_gradient(game, joint(v2(1, 0), v2(0, 1)), v2(1, 0));
    Vec expect(4);
    expect << 3, 1, 2, 2;
    CHECK((g - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }

  SUBCASE("zero everything gives zero") {
    const Vec g = pseudo_gradient(game, JointStrategy::zeros(2, 2), Vec::Zero(2));
    CHECK(g.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pseudo_gradient is affine: F(x,pi) - F(x,0) is the stacked S_i pi") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const PricingGame game = testing::random_game(rng);
    const JointStrategy x = testing::random_start(rng, game);
    const Vec pi = testing::random_price(rng, game);
    const Vec diff = pseudo_gradient(game, x, pi) - pseudo_gradient(game, x, Vec::Zero(pi.size()));
    Vec expect(game.joint_dim());
    for (int i = 0; i < game.num_followers(); ++i)
      expect.segment(i * game.follower_dim(), game.follower_dim()) =
          game.followers[static_cast<size_t>(i)].S * pi;
    CHECK((diff - expect).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, expect.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("assemble_F1 on the reference game has spectrum {1,1,3,3}") {
  const F1Info info = assemble_F1(g2_game());
  CHECK(info.lambda_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(info.lambda_max == doctest::Approx(3.0).epsilon(1e-12));
  Mat expect(4, 4);
  expect << 2, 0, 1, 0,  //
      0, 2, 0, 1,        //
      1, 0, 2, 0,        //
      0, 1, 0, 2;
  CHECK((info.F1 - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("assemble_F1 degenerate shapes") {
  SUBCASE("Q = 0, P = I, N = 3 gives the identity") {
    PricingGame game = g2_game();
    for (auto& f : game.followers) {
      f.P = Mat::Identity(2, 2);
      f.Q = Mat::Zero(2, 2);
    }
    game.followers.push_back(game.followers[0]);
    const F1Info info = assemble_F1(game);
    CHECK((info.F1 - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(info.lambda_min == doctest::Approx(1.0));
    CHECK(info.lambda_max == doctest::Approx(1.0));
  }

  SUBCASE("single follower reduces to P") {
    PricingGame game = g2_game();
    game.followers.resize(1);
    const F1Info info = assemble_F1(game);
    CHECK((info.F1 - game.followers[0].P).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("assemble_F1 rejects non-monotone games") {
  PricingGame game = g2_game();
  for (auto& f : game.followers) f.Q = 3.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(assemble_F1(game), MonotonicityError);
}

TEST_CASE("x'F1x > 0 for random nonzero x") {
  std::mt19937_64 rng(202);
  for (int g = 0; g < 5; ++g) {
    const PricingGame game = testing::random_game(rng);
    const F1Info info = assemble_F1(game);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < 200; ++k) {
      Vec x = Vec::NullaryExpr(info.F1.rows(), [&](Eigen::Index) { return gauss(rng); });
      if (x.norm() == 0.0) continue;
      CHECK(x.dot(info.F1 * x) > 0.0);
    }
  }
}

TEST_CASE("leader value and partials for the tracking objective") {
  const PricingGame game = g2_game();

  SUBCASE("sigma matches the set point") {
    const auto ev = leader_value_and_partials(
        game, joint(v2(1.0 / 3, 2.0 / 3), v2(1.0 / 3, 2.0 / 3)), v2(1, 0));
    CHECK(ev.value == doctest::Approx(0.0));
    CHECK(ev.d_pi.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    for (const auto& dx : ev.d_x)
      CHECK(dx.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("symmetric midpoint") {
    const auto ev = leader_value_and_partials(
        game, joint(v2(0.5, 0.5), v2(0.5, 0.5)), Vec::Zero(2));
    CHECK(ev.value == doctest::Approx(1.0 / 9).epsilon(1e-12));
    CHECK(ev.d_pi.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& dx : ev.d_x) {
      CHECK(dx(0) == doctest::Approx(1.0 / 3).epsilon(1e-12));
      CHECK(dx(1) == doctest::Approx(-1.0 / 3).epsilon(1e-12));
    }
  }

  SUBCASE("n_des equal to the aggregate zeroes the cost") {
    PricingGame g = g2_game();
    const JointStrategy x = joint(v2(0.2, 0.8), v2(0.7, 0.3));
    g.objective = std::make_shared<TrackingObjective>(x.aggregate());
    CHECK(leader_value_and_partials(g, x, Vec::Zero(2)).value == 0.0);
  }
}

TEST_CASE("leader partials match central finite differences") {
  std::mt19937_64 rng(303);
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const PricingGame game = testing::random_game(rng);
    const JointStrategy x = testing::random_start(rng, game);
    const Vec pi = testing::random_price(rng, game);
    const auto ev = leader_value_and_partials(game, x, pi);

    for (int k = 0; k < game.price_dim(); ++k) {
      Vec lo = pi, hi = pi;
      lo(k) -= h;
      hi(k) += h;
      const double fd = (game.objective->value(x, hi) - game.objective->value(x, lo)) / (2 * h);
      CHECK(std::abs(fd - ev.d_pi(k)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }

    for (int i = 0; i < game.num_followers(); ++i)
      for (int k = 0; k < game.follower_dim(); ++k) {
        JointStrategy xp = x, xm = x;
        Vec bp = x.block(i), bm = x.block(i);
        bp(k) += h;
        bm(k) -= h;
        xp.set_block(i, bp);
        xm.set_block(i, bm);
        const double fd =
            (game.objective->value(xp, pi) - game.objective->value(xm, pi)) / (2 * h);
        CHECK(std::abs(fd - ev.d_x[static_cast<size_t>(i)](k)) <=
              1e-6 * std::max(1.0, std::abs(fd)));
      }
  }
}

TEST_CASE("validate_game passes the reference game with a strict interior point") {
  const ValidationReport rep = validate_game(g2_game());
  CHECK(rep.ok());
  REQUIRE(rep.slater_points.size() == 2);
  for (const auto& p : rep.slater_points) {
    REQUIRE(p.has_value());
    CHECK((*p)(0) > 0.0);
    CHECK((*p)(1) > 0.0);
    CHECK((*p).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("validate_game flips exactly the targeted check") {
  SUBCASE("Q too large breaks P - Q > 0") {
    PricingGame game = g2_game();
    for (auto& f : game.followers) f.Q = 3.0 * Mat::Identity(2, 2);
    const ValidationReport rep = validate_game(game);
    CHECK_FALSE(rep.ok());
    for (const auto& c : rep.checks) {
      if (c.name.find("PminusQ_pd") != std::string::npos) {
        CHECK_FALSE(c.pass);
        CHECK(c.detail.find("-1") != std::string::npos);
      } else {
        CHECK(c.pass);
      }
    }
  }

  SUBCASE("negative fleet on a nonnegative simplex is infeasible") {
    PricingGame game = g2_game();
    game.followers[0].b = Vec::Constant(1, -1.0);
    const ValidationReport rep = validate_game(game);
    CHECK_FALSE(rep.ok());
    const auto* feas = rep.find("followers[0].feasible");
    REQUIRE(feas != nullptr);
    CHECK_FALSE(feas->pass);
    const auto* other = rep.find("followers[1].feasible");
    REQUIRE(other != nullptr);
    CHECK(other->pass);
  }

  SUBCASE("asymmetric P is reported against the right follower") {
    PricingGame game = g2_game();
    game.followers[0].P(0, 1) = 0.25;  // symmetry broken
    const ValidationReport rep = validate_game(game);
    const auto* sym = rep.find("followers[0].P_sym");
    REQUIRE(sym != nullptr);
    CHECK_FALSE(sym->pass);
  }
}

TEST_CASE("check_dimensions names the offending follower and field") {
  PricingGame game = g2_game();
  game.followers[0].r = Vec::Zero(3);
  try {
    check_dimensions(game);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("followers[0]") != std::string::npos);
    CHECK(msg.find("r") != std::string::npos);
  }
}

TEST_CASE("JointStrategy aggregate bookkeeping is exact") {
  std::mt19937_64 rng(404);
  const PricingGame game = testing::random_game(rng);
  const JointStrategy x = testing::random_start(rng, game);
  for (int i = 0; i < x.num_followers(); ++i) {
    const Vec lhs = x.aggregate_excluding(i) + x.block(i);
    CHECK((lhs - x.aggregate()).cwiseAbs().maxCoeff() == 0.0);
  }
  const JointStrategy back = JointStrategy::from_stacked(x.stacked(), x.num_followers());
  CHECK((back.stacked() - x.stacked()).cwiseAbs().maxCoeff() == 0.0);
}
