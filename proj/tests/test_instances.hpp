#pragma once

// Randomized problem instances shared by the unit and acceptance tests.
// Everything is seeded, so a failing case reproduces from its seed alone.

#include <random>
#include <vector>

#include "wpbc/game.hpp"
#include "wpbc/scenario.hpp"

namespace wpbc::testing {

inline RadioEnvironment default_env() {
  RadioEnvironment env;
  env.bandwidth_backscatter = 10.0;  // MHz, so throughput is Mbit per frame
  env.bandwidth_active = 10.0;
  return env;
}

inline Device make_device(DeviceKind kind, double d_bd, double d_dg, double noise) {
  Device dev;
  dev.kind = kind;
  dev.d_bd = d_bd;
  dev.d_dg = d_dg;
  dev.noise_power = noise;
  return dev;
}

/// The smallest heterogeneous instance: one device of each kind at short
/// range, where both transmission modes are profitable.
inline Network tiny_network() {
  RadioEnvironment env = default_env();
  std::vector<Device> devs = {
      make_device(DeviceKind::Awpd, 3.0, 10.0, 5e-10),
      make_device(DeviceKind::Pwpd, 3.0, 10.0, 5e-10),
      make_device(DeviceKind::Hwpd, 3.0, 10.0, 5e-10),
  };
  return Network::build(env, devs);
}

inline CostModel tiny_cost() {
  CostModel cost;
  cost.a_m = 1.0;
  cost.b_m = 0.5;
  cost.p_s_max = 2.0;
  cost.price_per_bit = 0.5;
  return cost;
}

/// Random network of `n` devices with mixed kinds and spread-out placements.
/// Parameter ranges stay inside the regime where trades are usually viable,
/// but nothing prevents a sampled instance from being no-trade.
inline Network random_network(std::mt19937_64& rng, int n) {
  RadioEnvironment env = default_env();
  std::uniform_real_distribution<double> d_bd(2.0, 6.0);
  std::uniform_real_distribution<double> d_dg(6.0, 14.0);
  std::uniform_int_distribution<int> kind(0, 2);
  std::vector<Device> devs;
  devs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<DeviceKind>(kind(rng));
    devs.push_back(make_device(k, d_bd(rng), d_dg(rng), 5e-10));
  }
  return Network::build(env, devs);
}

inline CostModel random_cost(std::mt19937_64& rng) {
  CostModel cost;
  std::uniform_real_distribution<double> a(0.5, 2.0);
  std::uniform_real_distribution<double> b(0.1, 4.0);
  std::uniform_real_distribution<double> pr(0.2, 1.0);
  cost.a_m = a(rng);
  cost.b_m = b(rng);
  cost.p_s_max = 2.0;
  cost.price_per_bit = pr(rng);
  return cost;
}

}  // namespace wpbc::testing
