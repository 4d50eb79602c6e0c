#include "doctest.h"
#include "test_instances.hpp"
#include "wpbc/game.hpp"
#include "wpbc/schemes.hpp"
#include "wpbc/solvers.hpp"

#include <random>

using namespace wpbc;
using namespace wpbc::testing;

TEST_CASE("follower best response closed form") {
  CostModel cost = tiny_cost();

  SUBCASE("zero margin at p_l = b_m") {
    CHECK(follower_best_response(cost.b_m, cost).power == doctest::Approx(0.0));
  }

  SUBCASE("direct substitution") {
    CostModel c;
    c.a_m = 0.5;
    c.b_m = 0.0;
    CHECK(follower_best_response(1.0, c).power == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("below-cost prices are flagged") {
    CHECK(follower_best_response(cost.b_m - 0.1, cost).below_cost);
    CHECK_FALSE(follower_best_response(cost.b_m + 0.1, cost).below_cost);
  }

  SUBCASE("matches golden-section maximization of the follower profit") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> a(0.1, 3.0), b(0.0, 5.0), margin(0.0, 8.0);
    for (int i = 0; i < 200; ++i) {
      CostModel c;
      c.a_m = a(rng);
      c.b_m = b(rng);
      const double p_l = c.b_m + margin(rng);
      auto profit = [&](double x) { return follower_utility(x, p_l, 1.0, c); };
      const auto r = golden_section_max({profit, 0.0, 10.0 * c.p_s_max, 1e-10});
      CHECK(follower_best_response(p_l, c).power == doctest::Approx(r.x).epsilon(1e-6));
    }
  }
}

TEST_CASE("follower utility") {
  CostModel cost = tiny_cost();
  CHECK(follower_utility(0.0, 3.0, 0.5, cost) == doctest::Approx(0.0));
  CHECK(follower_utility(1.0, 3.0, 0.0, cost) == doctest::Approx(0.0));
  // At the best response the profit is beta (p_l - b_m)^2 / (4 a_m).
  const double p_l = 1.7;
  const double star = follower_best_response(p_l, cost).power;
  const double expect = 0.5 * (p_l - cost.b_m) * (p_l - cost.b_m) / (4.0 * cost.a_m);
  CHECK(follower_utility(star, p_l, 0.5, cost) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("price cap") {
  CostModel cost = tiny_cost();
  CHECK(cost.price_cap() == doctest::Approx(cost.b_m + 2.0 * cost.a_m * cost.p_s_max));
}

TEST_CASE("leader utility") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();

  SUBCASE("zero revenue means pure energy cost") {
    CostModel zero_pr = cost;
    zero_pr.price_per_bit = 0.0;
    LeaderStrategy s;
    s.price = 2.0;
    s.beta = 0.5;
    s.schedule = equal_split_schedule(net, s.beta, {}, DevicePins::none(net));
    const double p_s = 1.0;
    CHECK(leader_utility(s, net, zero_pr, p_s) ==
          doctest::Approx(-s.price * s.beta * p_s).epsilon(1e-12));
  }

  SUBCASE("zero strategy is worth nothing") {
    LeaderStrategy s;
    s.price = cost.b_m;
    s.beta = 0.0;
    s.schedule = Schedule::zeros(1, 1, 1);
    CHECK(leader_utility(s, net, cost, 0.0) == doctest::Approx(0.0));
  }
}

TEST_CASE("social welfare drops the transfer term") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();
  LeaderStrategy s;
  s.price = 1.9;
  s.beta = 0.5;
  s.schedule = equal_split_schedule(net, s.beta, {}, DevicePins::none(net));
  const double p_s = follower_best_response(s.price, cost).power;
  const double ul = leader_utility(s, net, cost, p_s);
  const double uf = follower_utility(p_s, s.price, s.beta, cost);
  CHECK(social_welfare(net, cost, p_s, s.beta, s.schedule) ==
        doctest::Approx(ul + uf).epsilon(1e-12));
}

TEST_CASE("feasibility checks") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();

  SUBCASE("all-zero strategy is feasible") {
    LeaderStrategy s;
    s.price = cost.b_m;
    s.beta = 0.0;
    s.schedule = Schedule::zeros(1, 1, 1);
    CHECK(check_feasibility(s, net, cost).empty());
  }

  SUBCASE("backscatter time exceeding beta is reported") {
    Schedule sched = Schedule::zeros(1, 1, 1);
    sched.theta[0] = 0.3;
    sched.tau[0] = 0.2;
    const auto violations = check_feasibility_power(net, cost, 0.5, 0.4, sched);
    REQUIRE_FALSE(violations.empty());
    bool found = false;
    for (const auto& v : violations) {
      if (v.constraint == Constraint::EmitWindow) {
        found = true;
        CHECK(v.margin == doctest::Approx(0.1).epsilon(1e-9));
      }
    }
    CHECK(found);
  }

  SUBCASE("beacon power above the cap is reported with its margin") {
    Schedule sched = Schedule::zeros(1, 1, 1);
    const auto violations =
        check_feasibility_power(net, cost, cost.p_s_max + 0.25, 0.5, sched);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations.front().constraint == Constraint::BeaconPower);
    CHECK(violations.front().margin == doctest::Approx(0.25).epsilon(1e-9));
  }
}

TEST_CASE("stackelberg verification") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();
  GameOutcome out = pa_solve(net, cost);
  REQUIRE(out.negotiated);

  SUBCASE("equilibrium passes both checks") {
    const auto report = verify_stackelberg(out, net, cost);
    CHECK(report.follower_ok);
    CHECK(report.leader_ok);
  }

  SUBCASE("corrupting the price breaks only the leader check") {
    GameOutcome bad = out;
    // The equilibrium price sits at the low corner of its feasible interval,
    // so perturb toward the cap to stay feasible while breaking optimality.
    bad.strategy.price = 0.5 * (bad.strategy.price + cost.price_cap());
    bad.p_s_star = follower_best_response(bad.strategy.price, cost).power;
    const auto report = verify_stackelberg(bad, net, cost);
    CHECK(report.follower_ok);
    CHECK_FALSE(report.leader_ok);
  }
}
