#include "doctest.h"
#include "test_instances.hpp"
#include "wpbc/baselines.hpp"
#include "wpbc/oracle.hpp"
#include "wpbc/schemes.hpp"
#include "wpbc/solvers.hpp"

using namespace wpbc;
using namespace wpbc::testing;

TEST_CASE("grid search fundamentals") {
  CostModel cost = tiny_cost();

  SUBCASE("single PWPD price axis agrees with golden section") {
    RadioEnvironment env = default_env();
    Network net = Network::build(env, {make_device(DeviceKind::Pwpd, 3.0, 10.0, 5e-10)});

    GridSpec spec;
    spec.price_points = 400;
    spec.beta_points = 2;        // {0, 1}; beta = 1 is optimal for pure backscatter
    spec.schedule_points = 41;
    const auto grid = grid_search(net, cost, spec, OracleObjective::Leader);
    REQUIRE(grid.found);

    // Independent 1-D check: at beta = 1, theta = 1, maximize over the price.
    Schedule full = Schedule::zeros(0, 1, 0);
    full.theta[0] = 1.0;
    const DevicePins none = DevicePins::none(net);
    const auto iv = price_interval(net, cost, 1.0, full, {}, none);
    REQUIRE(iv.has_value());
    auto g = build_price_objective(net, cost, 1.0, full);
    const auto r = golden_section_max({g, iv->lo, iv->hi, 1e-10});
    CHECK(grid.value == doctest::Approx(r.value).epsilon(5e-2));
    CHECK(grid.value <= r.value + 1e-9);  // a grid never beats the true optimum
  }

  SUBCASE("infeasible everywhere reports no-trade") {
    RadioEnvironment env = default_env();
    // A backscatter-only device far outside decode range.
    Network net = Network::build(env, {make_device(DeviceKind::Pwpd, 50.0, 50.0, 5e-10)});
    GridSpec spec;
    spec.price_points = 10;
    spec.beta_points = 5;
    spec.schedule_points = 4;
    const auto grid = grid_search(net, cost, spec, OracleObjective::Leader);
    // Only the zero-schedule rows are feasible, so the best value is zero.
    CHECK(grid.value <= 1e-12);
  }

  SUBCASE("grid budget is enforced") {
    Network net = tiny_network();
    GridSpec spec;
    spec.price_points = 1000;
    spec.beta_points = 1000;
    spec.schedule_points = 100;
    CHECK_THROWS_AS(grid_search(net, cost, spec, OracleObjective::Leader), std::invalid_argument);
  }

  SUBCASE("welfare grid dominates the Stackelberg point") {
    Network net = tiny_network();
    GridSpec spec;
    spec.price_points = 30;
    spec.beta_points = 15;
    spec.schedule_points = 6;
    const auto eq = pa_solve(net, cost);
    REQUIRE(eq.negotiated);
    const auto grid = grid_search(net, cost, spec, OracleObjective::Welfare);
    REQUIRE(grid.found);
    // The exhaustive welfare maximum clears the equilibrium welfare up to
    // the grid's own discretization error.
    CHECK(grid.value >= eq.u_social - grid.discretization_error - 2e-2);
  }
}

TEST_CASE("local improvement probe") {
  Network net = tiny_network();
  CostModel cost = tiny_cost();

  SUBCASE("solver outputs admit no blockwise improvement") {
    const auto pa = pa_solve(net, cost);
    REQUIRE(pa.negotiated);
    CHECK(local_improvement_check(net, cost, pa) <= 1e-5);
    const auto ja = ja_solve(net, cost);
    REQUIRE(ja.negotiated);
    CHECK(local_improvement_check(net, cost, ja) <= 1e-5);
  }

  SUBCASE("a deliberately perturbed point is flagged") {
    auto out = pa_solve(net, cost);
    REQUIRE(out.negotiated);
    out.strategy.price = 0.5 * (out.strategy.price + cost.price_cap());
    out.p_s_star = follower_best_response(out.strategy.price, cost).power;
    CHECK(local_improvement_check(net, cost, out) > 1e-5);
  }
}
