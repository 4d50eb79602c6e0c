#include "doctest.h"
#include "test_instances.hpp"
#include "wpbc/throughput.hpp"

#include <cmath>

using namespace wpbc;
using namespace wpbc::testing;

TEST_CASE("xlog_term") {
  CHECK(xlog_term(0.0, 5.0) == 0.0);
  CHECK(xlog_term(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(xlog_term(2.0, 6.0) == doctest::Approx(4.0).epsilon(1e-12));  // 2 log2(4)

  // Derivative against central differences at interior points.
  for (double x : {0.3, 1.0, 2.5}) {
    const double h = 1e-6;
    const double fd = (xlog_term(x + h, 3.0) - xlog_term(x - h, 3.0)) / (2.0 * h);
    CHECK(xlog_term_dx(x, 3.0) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("backscatter rate") {
  CHECK(backscatter_rate(1.5, 0.0, 10.0) == 0.0);
  CHECK(backscatter_rate(1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(backscatter_rate(1e-2, 100.0, 1e7) == doctest::Approx(1e7).epsilon(1e-12));
}

TEST_CASE("harvested energy") {
  RadioEnvironment env = default_env();

  SUBCASE("HWPD with zero harvest window") {
    Device dev = make_device(DeviceKind::Hwpd, 3.0, 10.0, 5e-10);
    const auto coef = link_coefficients(dev, env);
    CHECK(harvested_energy(dev, coef, 0.4, 0.4, 1.0) == doctest::Approx(0.0));
  }

  SUBCASE("AWPD direct product phi g_bd p_s beta") {
    // Arrange g_bd = 1e-3 exactly via unit antenna gains and distance choice.
    env.antenna_gain_pb = env.antenna_gain_device = env.antenna_gain_gateway = 1.0;
    const double d = env.wavelength() / (4.0 * std::numbers::pi) * std::sqrt(1e3);
    Device dev = make_device(DeviceKind::Awpd, d, d, 1e-12);
    dev.harvest_efficiency = 0.6;
    const auto coef = link_coefficients(dev, env);
    CHECK(harvested_energy(dev, coef, 0.5, 0.0, 1.0) == doctest::Approx(3e-4).epsilon(1e-9));
  }

  SUBCASE("zero beacon power harvests nothing") {
    Device dev = make_device(DeviceKind::Awpd, 3.0, 10.0, 5e-10);
    const auto coef = link_coefficients(dev, env);
    CHECK(harvested_energy(dev, coef, 0.7, 0.0, 0.0) == 0.0);
  }
}

TEST_CASE("throughput components") {
  Network net = tiny_network();

  SUBCASE("zero schedule gives zero throughput") {
    Schedule z = Schedule::zeros(1, 1, 1);
    CHECK(throughput_backscatter(net, z, 1.0) == 0.0);
    CHECK(throughput_active(net, z, 0.5, 1.0) == 0.0);
    CHECK(network_throughput(net, z, 0.5, 1.0) == 0.0);
  }

  SUBCASE("zero beacon power gives zero throughput") {
    Schedule s = Schedule::zeros(1, 1, 1);
    s.theta[0] = 0.2;
    s.nu[0] = 0.3;
    s.tau[0] = 0.1;
    s.mu[0] = 0.1;
    CHECK(network_throughput(net, s, 0.5, 0.0) == doctest::Approx(0.0));
  }

  SUBCASE("matches a straight-line recomputation") {
    // Independent re-evaluation of the rate sums, written out longhand.
    Schedule s = Schedule::zeros(1, 1, 1);
    s.theta[0] = 0.15;
    s.nu[0] = 0.2;
    s.tau[0] = 0.1;
    s.mu[0] = 0.25;
    const double beta = 0.4, p_s = 1.3;

    const double wb = net.env.bandwidth_backscatter;
    const double wd = net.env.bandwidth_active;
    double expected = 0.0;
    // Backscatter: PWPD slot theta, HWPD slot tau.
    expected += s.theta[0] * wb * std::log2(1.0 + *net.pwpds[0].coef.kappa * p_s);
    expected += s.tau[0] * wb * std::log2(1.0 + *net.hwpds[0].coef.kappa * p_s);
    // Active: AWPD harvests over beta, HWPD over beta - tau; delta is the SNR
    // budget per watt-beta, so the slot rate is log2(1 + delta * span * p_s / time).
    const auto& aw = net.awpds[0];
    expected += s.nu[0] * wd * std::log2(1.0 + *aw.coef.delta * beta * p_s / s.nu[0]);
    const auto& hw = net.hwpds[0];
    expected += s.mu[0] * wd * std::log2(1.0 + *hw.coef.delta * (beta - s.tau[0]) * p_s / s.mu[0]);

    CHECK(network_throughput(net, s, beta, p_s) == doctest::Approx(expected).epsilon(1e-9));
  }
}
