#include "wpbc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wpbc {

namespace {

struct Entry {
  std::string section, key, value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const Entry& e) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != e.value.size()) {
    throw ScenarioError("line " + std::to_string(e.line) + ": " + e.section + "." + e.key +
                        ": not a number: '" + e.value + "'");
  }
  return v;
}

long parse_int(const Entry& e) {
  const double v = parse_double(e);
  if (v != std::floor(v)) {
    throw ScenarioError("line " + std::to_string(e.line) + ": " + e.section + "." + e.key +
                        ": expected an integer, got '" + e.value + "'");
  }
  return static_cast<long>(v);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Entry> tokenize(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ScenarioError("line " + std::to_string(line) + ": unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      entries.push_back({section, "", "", line});  // section marker (device list needs ordering)
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError("line " + std::to_string(line) + ": expected 'key = value', got '" + s + "'");
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ScenarioError("line " + std::to_string(line) + ": empty key or value");
    }
    if (section.empty()) {
      throw ScenarioError("line " + std::to_string(line) + ": key outside any [section]");
    }
    entries.push_back({section, key, value, line});
  }
  return entries;
}

void unknown_key(const Entry& e) {
  throw ScenarioError("line " + std::to_string(e.line) + ": unknown key " + e.section + "." +
                      e.key);
}

DeviceKind parse_kind(const Entry& e) {
  if (e.value == "awpd") return DeviceKind::Awpd;
  if (e.value == "pwpd") return DeviceKind::Pwpd;
  if (e.value == "hwpd") return DeviceKind::Hwpd;
  throw ScenarioError("line " + std::to_string(e.line) +
                      ": device.kind must be awpd|pwpd|hwpd, got '" + e.value + "'");
}

/// Applies a shared-parameter key to a device template; returns false for
/// keys it does not know.
bool apply_device_key(Device& d, const Entry& e) {
  if (e.key == "d_bd_m") d.d_bd = parse_double(e);
  else if (e.key == "d_dg_m") d.d_dg = parse_double(e);
  else if (e.key == "harvest_efficiency") d.harvest_efficiency = parse_double(e);
  else if (e.key == "backscatter_attenuation") d.backscatter_attenuation = parse_double(e);
  else if (e.key == "noise_power_w") d.noise_power = parse_double(e);
  else if (e.key == "p_tx_min_w") d.p_tx_min = parse_double(e);
  else if (e.key == "p_tx_max_w") d.p_tx_max = parse_double(e);
  else if (e.key == "e_min_j") d.e_min = parse_double(e);
  else if (e.key == "e_max_j") d.e_max = parse_double(e);
  else if (e.key == "snr_min") d.snr_min = parse_double(e);
  else return false;
  return true;
}

}  // namespace

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"pa", "ja", "fixed-price", "welfare",
                                          "bbcm", "httcm", "tdma"};
  return m;
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  sc.devices.clear();

  const std::vector<Entry> entries = tokenize(text);

  // Defaults echoed for every scalar key that the file leaves unset.
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!e.key.empty()) seen.insert(e.section + "." + e.key);
  }

  // Scenario-level defaults: a short-range 10/10/10 deployment where both
  // transmission modes are viable and the trade has a distance cutoff within
  // a 2-20 m sweep. These intentionally differ from the bare CostModel
  // defaults, which are unit-test-scale values.
  sc.cost.b_m = 6.0;
  sc.cost.p_s_max = 2.0;

  Device roster_template;  // shared parameters from [devices]
  roster_template.d_bd = 3.0;
  roster_template.d_dg = 10.0;
  roster_template.noise_power = 5e-10;
  long count_awpd = 10, count_pwpd = 10, count_hwpd = 10;
  bool explicit_devices = false;

  // Shared [devices] parameters are gathered first so that explicit [device]
  // entries inherit them regardless of section order in the file.
  for (const auto& e : entries) {
    if (e.section == "devices" && !e.key.empty() && e.key.find("_count") == std::string::npos) {
      if (!apply_device_key(roster_template, e)) unknown_key(e);
    }
  }

  Device* current_device = nullptr;
  std::vector<Device> listed;

  for (const auto& e : entries) {
    if (e.key.empty()) {  // section marker
      if (e.section == "device") {
        listed.push_back(roster_template);
        current_device = &listed.back();
        explicit_devices = true;
      } else if (e.section == "radio" || e.section == "cost" || e.section == "devices" ||
                 e.section == "solve" || e.section == "sweep") {
        current_device = nullptr;
      } else {
        throw ScenarioError("line " + std::to_string(e.line) + ": unknown section [" + e.section +
                            "]");
      }
      continue;
    }
    if (e.section == "radio") {
      if (e.key == "carrier_frequency_ghz") sc.env.carrier_frequency = parse_double(e) * 1e9;
      else if (e.key == "bandwidth_backscatter_mhz") sc.env.bandwidth_backscatter = parse_double(e);
      else if (e.key == "bandwidth_active_mhz") sc.env.bandwidth_active = parse_double(e);
      else if (e.key == "performance_gap") sc.env.performance_gap = parse_double(e);
      else if (e.key == "reflection_gamma0") sc.env.reflection_gamma0 = parse_double(e);
      else if (e.key == "reflection_gamma1") sc.env.reflection_gamma1 = parse_double(e);
      else if (e.key == "antenna_gain_pb_dbi") sc.env.antenna_gain_pb = dbi_to_linear(parse_double(e));
      else if (e.key == "antenna_gain_device_dbi") sc.env.antenna_gain_device = dbi_to_linear(parse_double(e));
      else if (e.key == "antenna_gain_gateway_dbi") sc.env.antenna_gain_gateway = dbi_to_linear(parse_double(e));
      else unknown_key(e);
    } else if (e.section == "cost") {
      if (e.key == "a_m") sc.cost.a_m = parse_double(e);
      else if (e.key == "b_m") sc.cost.b_m = parse_double(e);
      else if (e.key == "p_s_max_w") sc.cost.p_s_max = parse_double(e);
      else if (e.key == "price_per_bit") sc.cost.price_per_bit = parse_double(e);
      else unknown_key(e);
    } else if (e.section == "devices") {
      if (e.key == "awpd_count") count_awpd = parse_int(e);
      else if (e.key == "pwpd_count") count_pwpd = parse_int(e);
      else if (e.key == "hwpd_count") count_hwpd = parse_int(e);
      else if (!apply_device_key(roster_template, e)) unknown_key(e);
    } else if (e.section == "device") {
      if (!current_device) throw ScenarioError("line " + std::to_string(e.line) + ": stray device key");
      if (e.key == "kind") current_device->kind = parse_kind(e);
      else if (!apply_device_key(*current_device, e)) unknown_key(e);
    } else if (e.section == "solve") {
      if (e.key == "methods") {
        sc.methods = split_list(e.value);
        for (const auto& m : sc.methods) {
          if (std::find(known_methods().begin(), known_methods().end(), m) ==
              known_methods().end()) {
            throw ScenarioError("line " + std::to_string(e.line) + ": unknown method '" + m + "'");
          }
        }
        if (sc.methods.empty()) throw ScenarioError("line " + std::to_string(e.line) + ": empty method list");
      } else if (e.key == "tol_outer") sc.solve.tol_outer = parse_double(e);
      else if (e.key == "tol_cccp") sc.solve.tol_cccp = parse_double(e);
      else if (e.key == "scalar_tol") sc.solve.scalar_tol = parse_double(e);
      else if (e.key == "max_outer") sc.solve.max_outer = static_cast<int>(parse_int(e));
      else if (e.key == "seed") sc.seed = static_cast<std::uint64_t>(parse_int(e));
      else unknown_key(e);
    } else if (e.section == "sweep") {
      if (e.key == "variable") {
        static const std::set<std::string> allowed{"none", "distance_m", "price_per_bit",
                                                   "device_count"};
        if (!allowed.count(e.value)) {
          throw ScenarioError("line " + std::to_string(e.line) + ": unknown sweep variable '" +
                              e.value + "'");
        }
        sc.sweep.variable = e.value;
      } else if (e.key == "from") sc.sweep.from = parse_double(e);
      else if (e.key == "to") sc.sweep.to = parse_double(e);
      else if (e.key == "steps") sc.sweep.steps = static_cast<int>(parse_int(e));
      else if (e.key == "kind") {
        if (e.value != "awpd" && e.value != "pwpd" && e.value != "hwpd") {
          throw ScenarioError("line " + std::to_string(e.line) + ": sweep.kind must be awpd|pwpd|hwpd");
        }
        sc.sweep.kind = e.value;
      } else unknown_key(e);
    } else {
      throw ScenarioError("line " + std::to_string(e.line) + ": unknown section [" + e.section + "]");
    }
  }

  // Build the roster: counts first, explicit devices appended.
  auto add_kind = [&](DeviceKind k, long n, const char* field) {
    if (n < 0) throw ScenarioError(std::string("devices.") + field + ": negative count");
    for (long i = 0; i < n; ++i) {
      Device d = roster_template;
      d.kind = k;
      sc.devices.push_back(d);
    }
  };
  const bool counts_given = seen.count("devices.awpd_count") || seen.count("devices.pwpd_count") ||
                            seen.count("devices.hwpd_count") || !explicit_devices;
  if (counts_given) {
    add_kind(DeviceKind::Awpd, count_awpd, "awpd_count");
    add_kind(DeviceKind::Pwpd, count_pwpd, "pwpd_count");
    add_kind(DeviceKind::Hwpd, count_hwpd, "hwpd_count");
  }
  for (const auto& d : listed) sc.devices.push_back(d);

  // Validate against the type invariants, naming the offending field.
  try {
    validate(sc.env);
    validate(sc.cost);
    for (std::size_t i = 0; i < sc.devices.size(); ++i) {
      try {
        validate(sc.devices[i]);
      } catch (const std::invalid_argument& ex) {
        throw ScenarioError("device " + std::to_string(i) + ": " + ex.what());
      }
    }
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(ex.what());
  }
  if (sc.sweep.steps < 1) throw ScenarioError("sweep.steps: must be >= 1");
  if (sc.sweep.variable != "none" && sc.sweep.steps > 1 && sc.sweep.from == sc.sweep.to) {
    throw ScenarioError("sweep: from == to with steps > 1");
  }

  // Echo every default the file did not override.
  const std::vector<std::pair<std::string, std::string>> defaults = {
      {"radio.carrier_frequency_ghz", "2.4"},
      {"radio.bandwidth_backscatter_mhz", "10"},
      {"radio.bandwidth_active_mhz", "10"},
      {"radio.performance_gap", "0.5"},
      {"radio.reflection_gamma0", "1"},
      {"radio.reflection_gamma1", "-1"},
      {"radio.antenna_gain_pb_dbi", "6"},
      {"radio.antenna_gain_device_dbi", "6"},
      {"radio.antenna_gain_gateway_dbi", "6"},
      {"cost.a_m", "1"},
      {"cost.b_m", "6"},
      {"cost.p_s_max_w", "2"},
      {"cost.price_per_bit", "0.5"},
      {"devices.awpd_count", "10"},
      {"devices.pwpd_count", "10"},
      {"devices.hwpd_count", "10"},
      {"devices.d_bd_m", "3"},
      {"devices.d_dg_m", "10"},
      {"devices.harvest_efficiency", "0.6"},
      {"devices.backscatter_attenuation", "0.5"},
      {"devices.noise_power_w", "5e-10"},
      {"devices.p_tx_min_w", "1e-6"},
      {"devices.p_tx_max_w", "0.1"},
      {"devices.e_min_j", "0"},
      {"devices.e_max_j", "1e-3"},
      {"devices.snr_min", "2"},
      {"solve.methods", "pa,ja"},
      {"solve.tol_outer", "1e-6"},
      {"solve.tol_cccp", "1e-8"},
      {"solve.scalar_tol", "1e-9"},
      {"solve.max_outer", "500"},
      {"solve.seed", "1"},
      {"sweep.variable", "none"},
  };
  for (const auto& [key, value] : defaults) {
    if (!seen.count(key)) sc.applied_defaults.push_back(key + " = " + value);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

Scenario default_scenario() { return parse_scenario("[devices]\n"); }

}  // namespace wpbc
