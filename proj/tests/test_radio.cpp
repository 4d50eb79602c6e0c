#include "doctest.h"
#include <stdexcept>

#include "wpbc/radio.hpp"

#include <cmath>
#include <numbers>

using namespace wpbc;

TEST_CASE("friis gain basic identities") {
  // Numerator equals denominator.
  CHECK(friis_gain(1.0, 1.0, 4.0 * std::numbers::pi, 1.0) == doctest::Approx(1.0));
  // Inverse-square law: doubling the distance quarters the gain.
  const double g1 = friis_gain(2.5, 1.7, 0.125, 3.0);
  const double g2 = friis_gain(2.5, 1.7, 0.125, 6.0);
  CHECK(g2 == doctest::Approx(g1 / 4.0).epsilon(1e-12));
}

TEST_CASE("friis gain at 6 dBi and 2.4 GHz wavelength") {
  // Hand evaluation: 3.981^2 * 0.125^2 / (4 pi 2)^2.
  CHECK(friis_gain(3.981, 3.981, 0.125, 2.0) ==
        doctest::Approx(3.920348377224277e-4).epsilon(1e-12));
}

TEST_CASE("dbi conversion") {
  CHECK(dbi_to_linear(0.0) == doctest::Approx(1.0));
  CHECK(dbi_to_linear(6.0) == doctest::Approx(3.9810717055349722).epsilon(1e-12));
  CHECK(dbi_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("noise power from psd") {
  CHECK(noise_power_from_psd(1e-20, 1e7) == doctest::Approx(1e-13).epsilon(1e-12));
}

TEST_CASE("link coefficients per device kind") {
  RadioEnvironment env;

  SUBCASE("PWPD kappa with all factors cancelling") {
    // eta = 1, zeta = 1, gamma0 - gamma1 = pi/2 and unit channel gains give
    // kappa = 1: the (delta^2 * 4 / pi^2) factor collapses to 1.
    env.performance_gap = 1.0;
    env.reflection_gamma0 = std::numbers::pi / 2.0;
    env.reflection_gamma1 = 0.0;
    // Pick distances that make both Friis gains exactly 1.
    env.antenna_gain_pb = env.antenna_gain_device = env.antenna_gain_gateway = 1.0;
    const double unit_distance = env.wavelength() / (4.0 * std::numbers::pi);
    Device dev = {DeviceKind::Pwpd, unit_distance, unit_distance};
    dev.backscatter_attenuation = 1.0;
    dev.noise_power = 1.0;
    const auto coef = link_coefficients(dev, env);
    REQUIRE(coef.kappa.has_value());
    CHECK(*coef.kappa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(coef.delta.has_value());
  }

  SUBCASE("AWPD delta as a direct product") {
    // zeta = 0.5, phi = 0.6, g_BD = g_DG = 1e-3, N0 = 1e-12 -> 3e5.
    env.performance_gap = 0.5;
    env.antenna_gain_pb = env.antenna_gain_device = env.antenna_gain_gateway = 1.0;
    const double d_for_1e3 = env.wavelength() / (4.0 * std::numbers::pi) * std::sqrt(1e3);
    Device dev = {DeviceKind::Awpd, d_for_1e3, d_for_1e3};
    dev.harvest_efficiency = 0.6;
    dev.noise_power = 1e-12;
    const auto coef = link_coefficients(dev, env);
    CHECK(coef.g_bd == doctest::Approx(1e-3).epsilon(1e-12));
    REQUIRE(coef.delta.has_value());
    CHECK(*coef.delta == doctest::Approx(3e5).epsilon(1e-9));
    CHECK_FALSE(coef.kappa.has_value());
  }

  SUBCASE("HWPD carries both coefficients") {
    Device dev = {DeviceKind::Hwpd, 3.0, 10.0};
    const auto coef = link_coefficients(dev, env);
    CHECK(coef.kappa.has_value());
    CHECK(coef.delta.has_value());
  }
}

TEST_CASE("validation rejects bad fields by name") {
  Device dev;
  dev.d_bd = -1.0;
  CHECK_THROWS_WITH_AS(validate(dev), doctest::Contains("d_bd"), std::invalid_argument);

  RadioEnvironment env;
  env.performance_gap = 0.0;
  CHECK_THROWS_AS(validate(env), std::invalid_argument);
}
