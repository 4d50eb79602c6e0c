#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpbc/schemes.hpp"

namespace wpbc {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::string variable = "none";  // none | distance_m | price_per_bit | device_count
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
  std::string kind = "awpd";  // which roster a device_count sweep scales
};

/// A fully validated experiment description. Files are flat key = value
/// lines under [section] headers; units live in the key names. Unknown keys
/// are rejected, and every default that fills a missing key is recorded in
/// `applied_defaults` so output headers can echo the effective setup.
struct Scenario {
  RadioEnvironment env;
  CostModel cost;
  std::vector<Device> devices;
  SolveOptions solve;
  std::vector<std::string> methods{"pa", "ja"};
  SweepSpec sweep;
  std::uint64_t seed = 1;
  std::vector<std::string> applied_defaults;

  Network network() const { return Network::build(env, devices); }
};

/// Parses and validates a scenario file. Throws ScenarioError with the line
/// number for parse errors and the field path for invariant violations.
Scenario load_scenario(const std::string& path);

/// Same parser over an in-memory string (used by tests).
Scenario parse_scenario(const std::string& text);

/// The built-in 10/10/10 heterogeneous default setup.
Scenario default_scenario();

/// Known method names, in canonical order: pa, ja, fixed-price, welfare,
/// bbcm, httcm, tdma.
const std::vector<std::string>& known_methods();

}  // namespace wpbc
