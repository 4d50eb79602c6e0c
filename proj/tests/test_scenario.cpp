#include "doctest.h"
#include "wpbc/scenario.hpp"

#include <algorithm>

using namespace wpbc;

TEST_CASE("scenario parsing") {
  SUBCASE("minimal file applies all defaults") {
    const Scenario sc = parse_scenario("[devices]\n");
    CHECK(sc.devices.size() == 30);  // 10 of each kind
    CHECK(sc.cost.a_m > 0.0);
    CHECK(sc.methods == std::vector<std::string>{"pa", "ja"});
    CHECK_FALSE(sc.applied_defaults.empty());
    CHECK_NOTHROW(sc.network());
  }

  SUBCASE("comments, blanks and whitespace are tolerated") {
    const Scenario sc = parse_scenario(
        "# a comment\n"
        "\n"
        "[cost]\n"
        "  b_m = 1.5   # trailing comment\n"
        "[devices]\n"
        "awpd_count = 2\n"
        "pwpd_count = 0\n"
        "hwpd_count = 1\n");
    CHECK(sc.cost.b_m == doctest::Approx(1.5));
    CHECK(sc.devices.size() == 3);
  }

  SUBCASE("unknown keys are rejected with the line number") {
    CHECK_THROWS_WITH_AS(parse_scenario("[cost]\nnonsense = 1\n"), doctest::Contains("line 2"),
                         ScenarioError);
  }

  SUBCASE("unknown sections are rejected") {
    CHECK_THROWS_AS(parse_scenario("[quantum]\n"), ScenarioError);
  }

  SUBCASE("negative distance is rejected naming the field") {
    CHECK_THROWS_WITH_AS(parse_scenario("[devices]\nd_bd_m = -3\n"), doctest::Contains("d_bd"),
                         ScenarioError);
  }

  SUBCASE("explicit device entries inherit the roster template") {
    const Scenario sc = parse_scenario(
        "[devices]\n"
        "awpd_count = 0\n"
        "pwpd_count = 0\n"
        "hwpd_count = 0\n"
        "noise_power_w = 7e-10\n"
        "[device]\n"
        "kind = pwpd\n"
        "d_bd_m = 2.5\n");
    REQUIRE(sc.devices.size() == 1);
    CHECK(sc.devices[0].kind == DeviceKind::Pwpd);
    CHECK(sc.devices[0].d_bd == doctest::Approx(2.5));
    CHECK(sc.devices[0].noise_power == doctest::Approx(7e-10));
  }

  SUBCASE("sweep section round-trips") {
    const Scenario sc = parse_scenario(
        "[devices]\n"
        "[sweep]\n"
        "variable = distance_m\n"
        "from = 2\n"
        "to = 20\n"
        "steps = 10\n");
    CHECK(sc.sweep.variable == "distance_m");
    CHECK(sc.sweep.steps == 10);
  }

  SUBCASE("invalid sweep variable is rejected") {
    CHECK_THROWS_AS(parse_scenario("[devices]\n[sweep]\nvariable = frequency\n"), ScenarioError);
  }
}

TEST_CASE("default scenario is self-consistent") {
  const Scenario sc = default_scenario();
  CHECK(sc.devices.size() == 30);
  const Network net = sc.network();
  CHECK(net.awpds.size() == 10);
  CHECK(net.pwpds.size() == 10);
  CHECK(net.hwpds.size() == 10);
}

TEST_CASE("known methods are canonical") {
  const auto& m = known_methods();
  CHECK(m.size() == 7);
  CHECK(m.front() == "pa");
  CHECK(std::find(m.begin(), m.end(), "welfare") != m.end());
}
