#include "wpbc/throughput.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wpbc {

namespace {
constexpr double kLn2 = 0.6931471805599453;

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }
}  // namespace

double Schedule::backscatter_total() const { return sum(theta) + sum(tau); }
double Schedule::active_total() const { return sum(nu) + sum(mu); }

Schedule Schedule::zeros(std::size_t n_awpd, std::size_t n_pwpd, std::size_t n_hwpd) {
  Schedule s;
  s.theta.assign(n_pwpd, 0.0);
  s.nu.assign(n_awpd, 0.0);
  s.tau.assign(n_hwpd, 0.0);
  s.mu.assign(n_hwpd, 0.0);
  return s;
}

Network Network::build(const RadioEnvironment& env, const std::vector<Device>& devices) {
  if (devices.empty()) throw std::invalid_argument("Network: need at least one device");
  Network net;
  net.env = env;
  for (const Device& d : devices) {
    NetworkDevice nd{d, link_coefficients(d, env)};
    switch (d.kind) {
      case DeviceKind::Awpd: net.awpds.push_back(nd); break;
      case DeviceKind::Pwpd: net.pwpds.push_back(nd); break;
      case DeviceKind::Hwpd: net.hwpds.push_back(nd); break;
    }
  }
  return net;
}

bool Network::schedule_shape_ok(const Schedule& s) const {
  return s.theta.size() == pwpds.size() && s.nu.size() == awpds.size() &&
         s.tau.size() == hwpds.size() && s.mu.size() == hwpds.size();
}

double xlog_term(double x, double c) {
  if (x < 0 || c < 0) throw std::domain_error("xlog_term: negative input");
  if (x == 0.0) return 0.0;
  return x * std::log1p(c / x) / kLn2;
}

double xlog_term_dx(double x, double c) {
  if (x <= 0 || c < 0) throw std::domain_error("xlog_term_dx: need x > 0, c >= 0");
  return (std::log1p(c / x) - c / (x + c)) / kLn2;
}

double backscatter_rate(double kappa, double p_s, double bandwidth) {
  if (kappa < 0 || p_s < 0 || bandwidth < 0) {
    throw std::domain_error("backscatter_rate: negative input");
  }
  return bandwidth * std::log1p(kappa * p_s) / kLn2;
}

double harvested_energy(const Device& dev, const LinkCoefficients& coef, double beta,
                        double tau_h, double p_s) {
  if (!can_harvest(dev.kind)) throw std::invalid_argument("harvested_energy: PWPD cannot harvest");
  if (tau_h < 0 || beta < 0 || beta > 1 || p_s < 0) {
    throw std::domain_error("harvested_energy: arguments out of range");
  }
  const double window = (dev.kind == DeviceKind::Awpd) ? beta : beta - tau_h;
  if (window < 0) throw std::domain_error("harvested_energy: tau_h exceeds beta");
  return window * dev.harvest_efficiency * coef.g_bd * p_s;
}

double throughput_backscatter(const Network& net, const Schedule& sched, double p_s) {
  if (!net.schedule_shape_ok(sched)) throw std::invalid_argument("schedule shape mismatch");
  double total = 0.0;
  for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
    total += sched.theta[p] * backscatter_rate(*net.pwpds[p].coef.kappa, p_s,
                                               net.env.bandwidth_backscatter);
  }
  for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
    total += sched.tau[h] * backscatter_rate(*net.hwpds[h].coef.kappa, p_s,
                                             net.env.bandwidth_backscatter);
  }
  return total;
}

double throughput_active(const Network& net, const Schedule& sched, double beta, double p_s) {
  if (!net.schedule_shape_ok(sched)) throw std::invalid_argument("schedule shape mismatch");
  const double omega = net.env.bandwidth_active;
  double total = 0.0;
  for (std::size_t a = 0; a < net.awpds.size(); ++a) {
    total += omega * xlog_term(sched.nu[a], *net.awpds[a].coef.delta * beta * p_s);
  }
  for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
    if (sched.tau[h] > beta) throw std::domain_error("throughput_active: tau_h exceeds beta");
    total += omega * xlog_term(sched.mu[h], *net.hwpds[h].coef.delta * (beta - sched.tau[h]) * p_s);
  }
  return total;
}

double network_throughput(const Network& net, const Schedule& sched, double beta, double p_s) {
  return throughput_backscatter(net, sched, p_s) + throughput_active(net, sched, beta, p_s);
}

}  // namespace wpbc
