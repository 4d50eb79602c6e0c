#include "doctest.h"
#include "test_instances.hpp"
#include "wpbc/baselines.hpp"

using namespace wpbc;
using namespace wpbc::testing;

TEST_CASE("fixed-price baseline") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();

  SUBCASE("default price is the midpoint of the feasible band") {
    CHECK(default_fixed_price(cost) ==
          doctest::Approx(cost.b_m + cost.a_m * cost.p_s_max).epsilon(1e-12));
  }

  SUBCASE("zero revenue buys nothing") {
    CostModel c = cost;
    c.price_per_bit = 0.0;
    const auto out = solve_fixed_price(net, c, default_fixed_price(c));
    CHECK_FALSE(out.negotiated);
    CHECK(out.u_leader == 0.0);
  }

  SUBCASE("an enormous price kills the trade") {
    const auto out = solve_fixed_price(net, cost, 1e6);
    CHECK_FALSE(out.negotiated);
  }

  SUBCASE("prices below the supplier's marginal cost are rejected") {
    CHECK_THROWS_AS(solve_fixed_price(net, cost, cost.b_m - 0.1), std::invalid_argument);
  }
}

TEST_CASE("social welfare baseline") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();

  SUBCASE("zero revenue means zero welfare at no-trade") {
    CostModel c = cost;
    c.price_per_bit = 0.0;
    const auto out = solve_social_welfare(net, c);
    CHECK_FALSE(out.negotiated);
    CHECK(out.u_social == 0.0);
  }

  SUBCASE("welfare optimum dominates the equilibrium welfare") {
    const auto eq = pa_solve(net, cost);
    const auto sw = solve_social_welfare(net, cost);
    REQUIRE(eq.negotiated);
    REQUIRE(sw.negotiated);
    CHECK(sw.u_social >= eq.u_social - 1e-9);
  }
}

TEST_CASE("price of anarchy") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();
  const auto eq = pa_solve(net, cost);
  const auto sw = solve_social_welfare(net, cost);

  SUBCASE("bounded and consistent") {
    const double poa = price_of_anarchy(eq, sw);
    CHECK(poa >= 0.0);
    CHECK(poa <= 1.0);
    CHECK(poa == doctest::Approx(eq.u_social / sw.u_social).epsilon(1e-9));
  }

  SUBCASE("identical outcomes give exactly one") {
    CHECK(price_of_anarchy(sw, sw) == 1.0);
  }

  SUBCASE("failed negotiation gives zero") {
    GameOutcome dead;
    dead.negotiated = false;
    CHECK(price_of_anarchy(dead, sw) == 0.0);
    CHECK(price_of_anarchy(eq, dead) == 0.0);
  }
}

TEST_CASE("fixed transmission modes") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();

  SUBCASE("backscatter-only mode never allocates active time") {
    const auto out = solve_fixed_mode(net, cost, FixedMode::Bbcm);
    for (double v : out.strategy.schedule.nu) CHECK(v == 0.0);
    for (double v : out.strategy.schedule.mu) CHECK(v == 0.0);
  }

  SUBCASE("backscatter-only mode without backscatter devices earns nothing") {
    RadioEnvironment env = default_env();
    Network awpds_only = Network::build(env, {make_device(DeviceKind::Awpd, 3.0, 10.0, 5e-10),
                                              make_device(DeviceKind::Awpd, 4.0, 10.0, 5e-10)});
    const auto out = solve_fixed_mode(awpds_only, cost, FixedMode::Bbcm);
    CHECK_FALSE(out.negotiated);
    CHECK(out.u_leader == 0.0);
  }

  SUBCASE("harvest-only mode never allocates backscatter time") {
    const auto out = solve_fixed_mode(net, cost, FixedMode::Httcm);
    for (double v : out.strategy.schedule.theta) CHECK(v == 0.0);
    for (double v : out.strategy.schedule.tau) CHECK(v == 0.0);
  }

  SUBCASE("rigid TDMA splits both windows equally") {
    const auto out = solve_fixed_mode(net, cost, FixedMode::Tdma);
    REQUIRE(out.negotiated);
    CHECK(out.strategy.beta == doctest::Approx(0.5));
    // One PWPD + one HWPD share the emit window: 0.25 each.
    CHECK(out.strategy.schedule.theta[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(out.strategy.schedule.tau[0] == doctest::Approx(0.25).epsilon(1e-12));
    // One AWPD + one HWPD share the sleep window.
    CHECK(out.strategy.schedule.nu[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(out.strategy.schedule.mu[0] == doctest::Approx(0.25).epsilon(1e-12));
  }

  SUBCASE("full problem dominates every mode") {
    const auto full = ja_solve(net, cost);
    REQUIRE(full.negotiated);
    for (FixedMode m : {FixedMode::Bbcm, FixedMode::Httcm, FixedMode::Tdma}) {
      const auto out = solve_fixed_mode(net, cost, m);
      CHECK(full.u_leader >= out.u_leader - 1e-6);
    }
  }
}
