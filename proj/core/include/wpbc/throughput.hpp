#pragma once

#include <cstddef>
#include <vector>

#include "wpbc/radio.hpp"

namespace wpbc {

/// Time-allocation vectors over the unit frame. theta/tau are backscatter
/// slots (PWPDs / HWPDs) inside the emitting period; nu/mu are active
/// transmission slots (AWPDs / HWPDs) inside the sleeping period.
struct Schedule {
  std::vector<double> theta;
  std::vector<double> nu;
  std::vector<double> tau;
  std::vector<double> mu;

  double backscatter_total() const;
  double active_total() const;
  static Schedule zeros(std::size_t n_awpd, std::size_t n_pwpd, std::size_t n_hwpd);
};

/// A device together with its precomputed link coefficients.
struct NetworkDevice {
  Device dev;
  LinkCoefficients coef;
};

/// Devices grouped by kind so schedule vectors index them directly:
/// theta[i] <-> pwpds[i], nu[i] <-> awpds[i], tau[i]/mu[i] <-> hwpds[i].
struct Network {
  RadioEnvironment env;
  std::vector<NetworkDevice> awpds;
  std::vector<NetworkDevice> pwpds;
  std::vector<NetworkDevice> hwpds;

  static Network build(const RadioEnvironment& env, const std::vector<Device>& devices);

  std::size_t size() const { return awpds.size() + pwpds.size() + hwpds.size(); }
  /// Number of schedule variables: P + A + 2H.
  std::size_t schedule_dim() const { return pwpds.size() + awpds.size() + 2 * hwpds.size(); }
  bool schedule_shape_ok(const Schedule& s) const;
};

/// x * log2(1 + c/x), continuously extended to 0 at x = 0.
double xlog_term(double x, double c);

/// Derivative of xlog_term w.r.t. x (finite limit log2' terms; diverges as
/// x -> 0+ like log2(c/x), callers keep x interior).
double xlog_term_dx(double x, double c);

/// Omega_B * log2(1 + kappa * p_s).
double backscatter_rate(double kappa, double p_s, double bandwidth);

/// Energy gathered over the harvest window: AWPD harvests the whole emitting period,
/// HWPD over (beta - tau_h). PWPDs cannot harvest.
double harvested_energy(const Device& dev, const LinkCoefficients& coef, double beta,
                        double tau_h, double p_s);

/// Total backscatter throughput over the emitting period.
double throughput_backscatter(const Network& net, const Schedule& sched, double p_s);

/// Total active (HTT) throughput over the sleeping period.
double throughput_active(const Network& net, const Schedule& sched, double beta, double p_s);

/// R_sum: backscatter + active throughput for the unit frame.
double network_throughput(const Network& net, const Schedule& sched, double beta, double p_s);

}  // namespace wpbc
