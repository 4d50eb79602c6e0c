#pragma once

#include <optional>
#include <string>

namespace wpbc {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Device classes of the heterogeneous network.
///   Awpd: harvest-then-transmit only.
///   Pwpd: bistatic backscatter only.
///   Hwpd: both functions.
enum class DeviceKind { Awpd, Pwpd, Hwpd };

std::string to_string(DeviceKind kind);

constexpr bool can_backscatter(DeviceKind k) { return k != DeviceKind::Awpd; }
constexpr bool can_harvest(DeviceKind k) { return k != DeviceKind::Pwpd; }

/// Converts an antenna gain in dBi to a linear gain.
double dbi_to_linear(double dbi);

/// Total noise power (W) over a bandwidth (Hz) from a psd (W/Hz).
double noise_power_from_psd(double psd_w_per_hz, double bandwidth_hz);

/// Carrier, bandwidths, noise model and backscatter load parameters shared
/// by all links. Gains are linear; bandwidths are in whatever rate unit the
/// scenario uses (the default scenario works in MHz so throughputs come out
/// in Mbit per frame).
struct RadioEnvironment {
  double carrier_frequency = 2.4e9;   // Hz
  double bandwidth_backscatter = 10.0;
  double bandwidth_active = 10.0;
  double performance_gap = 0.5;       // zeta in (0, 1]
  double reflection_gamma0 = 1.0;
  double reflection_gamma1 = -1.0;    // enters only through (gamma0-gamma1)^2
  double antenna_gain_pb = 3.981;     // linear
  double antenna_gain_device = 3.981;
  double antenna_gain_gateway = 3.981;

  double wavelength() const { return kSpeedOfLight / carrier_frequency; }
  double reflection_delta_sq() const {
    const double d = reflection_gamma0 - reflection_gamma1;
    return d * d;
  }
};

/// One IoT node. Fields not applicable to the kind are ignored.
struct Device {
  DeviceKind kind = DeviceKind::Pwpd;
  double d_bd = 1.0;  // PB -> device distance, m
  double d_dg = 1.0;  // device -> gateway distance, m
  double harvest_efficiency = 0.6;      // phi, AWPD/HWPD
  double backscatter_attenuation = 0.5; // eta, PWPD/HWPD
  double noise_power = 1e-12;           // N0, W over this device's link bandwidth
  double p_tx_min = 1e-6;               // W, constraint on active transmit power
  double p_tx_max = 0.1;                // W
  double e_min = 0.0;                   // J, harvested-energy window
  double e_max = 1e-3;                  // J
  double snr_min = 2.0;                 // linear, backscatter decode threshold
};

/// Validates invariants; throws std::invalid_argument naming the field.
void validate(const RadioEnvironment& env);
void validate(const Device& dev);

/// Per-device composite coefficients consumed by the throughput formulas.
/// kappa: backscatter SNR per watt of beacon power (PWPD/HWPD).
/// delta: HTT SNR budget per watt-beta (AWPD/HWPD).
struct LinkCoefficients {
  double g_bd = 0.0;
  double g_dg = 0.0;
  std::optional<double> kappa;
  std::optional<double> delta;
};

/// Free-space (Friis) channel gain: g_tx * g_rx * lambda^2 / (4 pi d)^2.
double friis_gain(double g_tx, double g_rx, double wavelength, double distance);

/// Builds kappa/delta for the device's kind; the inapplicable one is absent.
LinkCoefficients link_coefficients(const Device& dev, const RadioEnvironment& env);

}  // namespace wpbc
