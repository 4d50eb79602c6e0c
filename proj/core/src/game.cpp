#include "wpbc/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpbc {

namespace {
constexpr double kTimeEps = 1e-12;   // below this a slot counts as unallocated
constexpr double kSlack = 1e-9;      // numerical slack before reporting a violation

void add_violation(std::vector<Violation>& out, Constraint c, std::string detail, double margin) {
  if (margin > kSlack) out.push_back(Violation{c, std::move(detail), margin});
}
}  // namespace

void validate(const CostModel& cost) {
  if (cost.a_m <= 0) throw std::invalid_argument("a_m must be > 0");
  if (cost.b_m < 0) throw std::invalid_argument("b_m must be >= 0");
  if (cost.p_s_max <= 0) throw std::invalid_argument("p_s_max must be > 0");
  if (cost.price_per_bit < 0) throw std::invalid_argument("price_per_bit must be >= 0");
}

FollowerResponse follower_best_response(double p_l, const CostModel& cost) {
  if (p_l < cost.b_m) return {0.0, true};
  return {(p_l - cost.b_m) / (2.0 * cost.a_m), false};
}

double follower_utility(double p_s, double p_l, double beta, const CostModel& cost) {
  return beta * (p_l * p_s - cost.a_m * p_s * p_s - cost.b_m * p_s);
}

double leader_utility(const LeaderStrategy& strategy, const Network& net, const CostModel& cost,
                      double p_s) {
  const double revenue = cost.price_per_bit *
      network_throughput(net, strategy.schedule, strategy.beta, p_s);
  return revenue - strategy.price * strategy.beta * p_s;
}

double social_welfare(const Network& net, const CostModel& cost, double p_s, double beta,
                      const Schedule& sched) {
  const double revenue = cost.price_per_bit * network_throughput(net, sched, beta, p_s);
  return revenue - beta * (cost.a_m * p_s * p_s + cost.b_m * p_s);
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::BeaconPower: return "beacon_power";
    case Constraint::TxPower: return "tx_power";
    case Constraint::Energy: return "energy";
    case Constraint::BackscatterSnr: return "backscatter_snr";
    case Constraint::EmitWindow: return "emit_window";
    case Constraint::SleepWindow: return "sleep_window";
  }
  return "?";
}

std::vector<Violation> check_feasibility_power(const Network& net, const CostModel& cost,
                                               double p_s, double beta, const Schedule& sched) {
  if (!net.schedule_shape_ok(sched)) throw std::invalid_argument("schedule shape mismatch");
  std::vector<Violation> out;

  add_violation(out, Constraint::BeaconPower, "P_S below 0", -p_s);
  add_violation(out, Constraint::BeaconPower, "P_S above cap", p_s - cost.p_s_max);

  add_violation(out, Constraint::EmitWindow, "beta below 0", -beta);
  add_violation(out, Constraint::EmitWindow, "beta above 1", beta - 1.0);
  add_violation(out, Constraint::EmitWindow, "backscatter time exceeds beta",
                sched.backscatter_total() - beta);
  add_violation(out, Constraint::SleepWindow, "active time exceeds 1 - beta",
                sched.active_total() - (1.0 - beta));

  auto check_entries = [&](const std::vector<double>& v, Constraint c, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      add_violation(out, c, std::string(name) + "[" + std::to_string(i) + "] negative", -v[i]);
    }
  };
  check_entries(sched.theta, Constraint::EmitWindow, "theta");
  check_entries(sched.tau, Constraint::EmitWindow, "tau");
  check_entries(sched.nu, Constraint::SleepWindow, "nu");
  check_entries(sched.mu, Constraint::SleepWindow, "mu");
  for (std::size_t h = 0; h < sched.tau.size(); ++h) {
    add_violation(out, Constraint::EmitWindow, "tau[" + std::to_string(h) + "] exceeds beta",
                  sched.tau[h] - beta);
  }
  if (!out.empty()) return out;  // windows broken; device checks would be ill-defined

  auto check_active = [&](const NetworkDevice& nd, double active_time, double harvest_window,
                          const std::string& label) {
    const double energy = harvest_window * nd.dev.harvest_efficiency * nd.coef.g_bd * p_s;
    add_violation(out, Constraint::Energy, label + " energy below e_min", nd.dev.e_min - energy);
    add_violation(out, Constraint::Energy, label + " energy above e_max", energy - nd.dev.e_max);
    if (active_time > kTimeEps) {
      const double p_t = energy / active_time;
      add_violation(out, Constraint::TxPower, label + " tx power below p_tx_min",
                    nd.dev.p_tx_min - p_t);
      add_violation(out, Constraint::TxPower, label + " tx power above p_tx_max",
                    p_t - nd.dev.p_tx_max);
    }
  };
  auto check_snr = [&](const NetworkDevice& nd, double bs_time, const std::string& label) {
    if (bs_time > kTimeEps) {
      add_violation(out, Constraint::BackscatterSnr, label + " backscatter SNR below threshold",
                    nd.dev.snr_min - *nd.coef.kappa * p_s);
    }
  };

  for (std::size_t a = 0; a < net.awpds.size(); ++a) {
    check_active(net.awpds[a], sched.nu[a], beta, "AWPD[" + std::to_string(a) + "]");
  }
  for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
    const std::string label = "HWPD[" + std::to_string(h) + "]";
    check_active(net.hwpds[h], sched.mu[h], beta - sched.tau[h], label);
    check_snr(net.hwpds[h], sched.tau[h], label);
  }
  for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
    check_snr(net.pwpds[p], sched.theta[p], "PWPD[" + std::to_string(p) + "]");
  }
  return out;
}

std::vector<Violation> check_feasibility(const LeaderStrategy& strategy, const Network& net,
                                         const CostModel& cost) {
  const double p_s = follower_best_response(strategy.price, cost).power;
  return check_feasibility_power(net, cost, p_s, strategy.beta, strategy.schedule);
}

namespace {

double utility_at(const LeaderStrategy& s, const Network& net, const CostModel& cost) {
  return leader_utility(s, net, cost, follower_best_response(s.price, cost).power);
}

/// Probes candidate strategies around `base` along one mutated copy at a time.
struct LeaderProbe {
  const Network& net;
  const CostModel& cost;
  double base_value;
  const VerifyOptions& opts;
  double max_gain = 0.0;
  int skipped = 0;

  void try_candidate(const LeaderStrategy& cand) {
    if (!check_feasibility(cand, net, cost).empty()) {
      ++skipped;
      return;
    }
    max_gain = std::max(max_gain, utility_at(cand, net, cost) - base_value);
  }
};

}  // namespace

VerifyReport verify_stackelberg(const GameOutcome& outcome, const Network& net,
                                const CostModel& cost, const VerifyOptions& opts) {
  VerifyReport report;
  const LeaderStrategy& star = outcome.strategy;

  // Follower optimality over a power grid at the equilibrium price/beta.
  {
    const double p_star = outcome.p_s_star;
    const double hi = std::max(2.0 * cost.p_s_max, 2.0 * p_star + 1.0);
    const double u_star = follower_utility(p_star, star.price, star.beta, cost);
    double worst = 0.0;
    for (int i = 0; i < opts.follower_grid; ++i) {
      const double p = hi * static_cast<double>(i) / (opts.follower_grid - 1);
      worst = std::max(worst, follower_utility(p, star.price, star.beta, cost) - u_star);
    }
    report.follower_gap = worst;
    report.follower_ok = worst <= opts.tolerance;
  }

  // Leader single-block perturbations.
  LeaderProbe probe{net, cost, utility_at(star, net, cost), opts};
  auto span_for = [&](double scale) { return std::max(opts.relative_span * scale, 1e-4); };

  const double price_span = span_for(cost.price_cap() - cost.b_m);
  for (int i = 0; i < opts.leader_grid; ++i) {
    const double off = price_span * (2.0 * i / (opts.leader_grid - 1) - 1.0);
    if (off == 0.0) continue;
    LeaderStrategy cand = star;
    cand.price = star.price + off;
    probe.try_candidate(cand);
  }
  const double beta_span = span_for(1.0);
  for (int i = 0; i < opts.leader_grid; ++i) {
    const double off = beta_span * (2.0 * i / (opts.leader_grid - 1) - 1.0);
    if (off == 0.0) continue;
    LeaderStrategy cand = star;
    cand.beta = star.beta + off;
    probe.try_candidate(cand);
  }
  auto sweep_coord = [&](std::vector<double> Schedule::*member) {
    const std::size_t n = (star.schedule.*member).size();
    for (std::size_t j = 0; j < n; ++j) {
      for (int i = 0; i < opts.leader_grid; ++i) {
        const double off = beta_span * (2.0 * i / (opts.leader_grid - 1) - 1.0);
        if (off == 0.0) continue;
        LeaderStrategy cand = star;
        (cand.schedule.*member)[j] += off;
        probe.try_candidate(cand);
      }
    }
  };
  sweep_coord(&Schedule::theta);
  sweep_coord(&Schedule::nu);
  sweep_coord(&Schedule::tau);
  sweep_coord(&Schedule::mu);

  report.leader_gap = probe.max_gain;
  report.skipped_infeasible = probe.skipped;
  report.leader_ok = probe.max_gain <= opts.tolerance;
  return report;
}

}  // namespace wpbc
