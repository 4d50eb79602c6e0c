#include "wpbc/radio.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wpbc {

std::string to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::Awpd: return "AWPD";
    case DeviceKind::Pwpd: return "PWPD";
    case DeviceKind::Hwpd: return "HWPD";
  }
  return "?";
}

double dbi_to_linear(double dbi) { return std::pow(10.0, dbi / 10.0); }

double noise_power_from_psd(double psd_w_per_hz, double bandwidth_hz) {
  if (psd_w_per_hz <= 0 || bandwidth_hz <= 0) {
    throw std::invalid_argument("noise_power_from_psd: inputs must be positive");
  }
  return psd_w_per_hz * bandwidth_hz;
}

void validate(const RadioEnvironment& env) {
  if (env.carrier_frequency <= 0) throw std::invalid_argument("carrier_frequency must be > 0");
  if (env.bandwidth_backscatter <= 0) throw std::invalid_argument("bandwidth_backscatter must be > 0");
  if (env.bandwidth_active <= 0) throw std::invalid_argument("bandwidth_active must be > 0");
  if (env.performance_gap <= 0 || env.performance_gap > 1.0) {
    throw std::invalid_argument("performance_gap must lie in (0, 1]");
  }
  if (env.reflection_gamma0 == env.reflection_gamma1) {
    throw std::invalid_argument("reflection coefficients must differ");
  }
  if (env.antenna_gain_pb <= 0 || env.antenna_gain_device <= 0 || env.antenna_gain_gateway <= 0) {
    throw std::invalid_argument("antenna gains must be > 0");
  }
}

void validate(const Device& dev) {
  if (dev.d_bd <= 0) throw std::invalid_argument("d_bd must be > 0");
  if (dev.d_dg <= 0) throw std::invalid_argument("d_dg must be > 0");
  if (dev.noise_power <= 0) throw std::invalid_argument("noise_power must be > 0");
  if (can_harvest(dev.kind)) {
    if (dev.harvest_efficiency <= 0 || dev.harvest_efficiency > 1.0) {
      throw std::invalid_argument("harvest_efficiency must lie in (0, 1]");
    }
    if (dev.p_tx_min < 0 || dev.p_tx_min > dev.p_tx_max) {
      throw std::invalid_argument("need 0 <= p_tx_min <= p_tx_max");
    }
    if (dev.e_min < 0 || dev.e_min > dev.e_max) {
      throw std::invalid_argument("need 0 <= e_min <= e_max");
    }
  }
  if (can_backscatter(dev.kind)) {
    if (dev.backscatter_attenuation <= 0 || dev.backscatter_attenuation > 1.0) {
      throw std::invalid_argument("backscatter_attenuation must lie in (0, 1]");
    }
    if (dev.snr_min < 0) throw std::invalid_argument("snr_min must be >= 0");
  }
}

double friis_gain(double g_tx, double g_rx, double wavelength, double distance) {
  if (g_tx <= 0 || g_rx <= 0 || wavelength <= 0 || distance <= 0) {
    throw std::domain_error("friis_gain: all inputs must be positive");
  }
  const double denom = 4.0 * std::numbers::pi * distance;
  return g_tx * g_rx * wavelength * wavelength / (denom * denom);
}

LinkCoefficients link_coefficients(const Device& dev, const RadioEnvironment& env) {
  validate(env);
  validate(dev);

  LinkCoefficients out;
  const double lambda = env.wavelength();
  out.g_bd = friis_gain(env.antenna_gain_pb, env.antenna_gain_device, lambda, dev.d_bd);
  out.g_dg = friis_gain(env.antenna_gain_device, env.antenna_gain_gateway, lambda, dev.d_dg);

  const double zeta = env.performance_gap;
  if (can_backscatter(dev.kind)) {
    const double eta = dev.backscatter_attenuation;
    out.kappa = zeta * eta * eta * out.g_bd * out.g_dg * env.reflection_delta_sq() * 4.0 /
                (std::numbers::pi * std::numbers::pi * dev.noise_power);
  }
  if (can_harvest(dev.kind)) {
    out.delta = zeta * dev.harvest_efficiency * out.g_dg * out.g_bd / dev.noise_power;
  }
  return out;
}

}  // namespace wpbc
