#include "wpbc/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace wpbc {

namespace {

constexpr double kTimeEps = 1e-12;

double welfare_of(const Network& net, const CostModel& cost, double p_s, double beta,
                  const Schedule& sched) {
  return social_welfare(net, cost, p_s, beta, sched);
}

/// Welfare as a function of the beacon power at fixed (beta, schedule).
std::function<double(double)> welfare_power_objective(const Network& net, const CostModel& cost,
                                                      double beta, const Schedule& sched) {
  return [&net, &cost, beta, sched](double p_s) {
    return welfare_of(net, cost, p_s, beta, sched);
  };
}

/// Welfare as a function of beta at fixed (P_S, schedule).
std::function<double(double)> welfare_beta_objective(const Network& net, const CostModel& cost,
                                                     double p_s, const Schedule& sched) {
  return [&net, &cost, p_s, sched](double beta) {
    return welfare_of(net, cost, p_s, beta, sched);
  };
}

double maximize_scalar(const std::function<double(double)>& f, const Interval& iv,
                       double incumbent, double tol) {
  // Interval::valid() tolerates hi < lo by up to 1e-15; collapse to a point.
  ScalarResult res = golden_section_max({f, iv.lo, std::max(iv.lo, iv.hi), tol});
  double x = res.x, v = res.value;
  const double flo = f(iv.lo);
  if (flo >= v - 1e-12 * (1.0 + std::abs(v))) {
    x = iv.lo;
    v = flo;
  }
  if (incumbent >= iv.lo - 1e-12 && incumbent <= iv.hi + 1e-12) {
    const double fi = f(std::clamp(incumbent, iv.lo, iv.hi));
    if (fi > v) return std::clamp(incumbent, iv.lo, iv.hi);
  }
  return x;
}

GameOutcome no_trade(const Network& net, std::vector<double> trace) {
  GameOutcome out;
  out.strategy.schedule = Schedule::zeros(net.awpds.size(), net.pwpds.size(), net.hwpds.size());
  out.negotiated = false;
  out.converged = true;
  out.trace = std::move(trace);
  out.iterations = out.trace.empty() ? 0 : static_cast<int>(out.trace.size()) - 1;
  return out;
}

}  // namespace

double default_fixed_price(const CostModel& cost) { return cost.b_m + cost.a_m * cost.p_s_max; }

GameOutcome solve_fixed_price(const Network& net, const CostModel& cost, double p_l,
                              const SolveOptions& opts, const ScheduleMask& mask) {
  if (p_l < cost.b_m) throw std::invalid_argument("solve_fixed_price: p_l below marginal cost");

  // Non-negotiated trading: the beacon power is the leader's own block, no
  // follower response. Devices unservable even at the power cap get pinned.
  DevicePins pins = DevicePins::none(net);
  if (mask.backscatter) {
    for (std::size_t p = 0; p < net.pwpds.size(); ++p) {
      pins.theta[p] = *net.pwpds[p].coef.kappa * cost.p_s_max < net.pwpds[p].dev.snr_min;
    }
    for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
      pins.tau[h] = *net.hwpds[h].coef.kappa * cost.p_s_max < net.hwpds[h].dev.snr_min;
    }
  }

  LeaderStrategy cur;
  cur.price = p_l;
  cur.beta = 0.5;
  cur.schedule = equal_split_schedule(net, cur.beta, mask, pins);
  double p_s = 0.5 * cost.p_s_max;

  auto utility = [&](double power, double beta, const Schedule& sched) {
    LeaderStrategy s{p_l, beta, sched};
    return leader_utility(s, net, cost, power);
  };

  std::vector<double> trace{utility(p_s, cur.beta, cur.schedule)};
  bool converged = false;
  for (int n = 1; n <= opts.max_outer; ++n) {
    // Beacon-power block; the feasible window matches the leader's price
    // block under the substitution p_l = b_m + 2 a_m P_S.
    auto piv = price_interval(net, cost, cur.beta, cur.schedule, mask, pins);
    if (!piv) return no_trade(net, std::move(trace));
    const Interval power_iv{(piv->lo - cost.b_m) / (2.0 * cost.a_m),
                            (piv->hi - cost.b_m) / (2.0 * cost.a_m)};
    p_s = maximize_scalar([&](double x) { return utility(x, cur.beta, cur.schedule); }, power_iv,
                          p_s, opts.scalar_tol);

    auto biv = beta_interval(net, cost, p_s, cur.schedule, mask);
    if (!biv) return no_trade(net, std::move(trace));
    cur.beta = maximize_scalar([&](double x) { return utility(p_s, x, cur.schedule); }, *biv,
                               cur.beta, opts.scalar_tol);

    auto s = solve_schedule_for_power(net, cost.price_per_bit, p_s, cur.beta, mask, pins,
                                      cur.schedule);
    if (!s) return no_trade(net, std::move(trace));
    if (utility(p_s, cur.beta, *s) >= utility(p_s, cur.beta, cur.schedule)) cur.schedule = *s;

    const double u = utility(p_s, cur.beta, cur.schedule);
    const double prev = trace.back();
    trace.push_back(u);
    if (std::abs(u - prev) < opts.tol_outer) {
      converged = true;
      break;
    }
  }

  GameOutcome out;
  out.strategy = cur;
  out.converged = converged;
  out.trace = std::move(trace);
  out.iterations = static_cast<int>(out.trace.size()) - 1;
  const double u = utility(p_s, cur.beta, cur.schedule);
  if (u <= 0.0) {
    out.negotiated = false;
    return out;
  }
  out.negotiated = true;
  out.p_s_star = p_s;
  out.u_leader = u;
  out.u_follower = follower_utility(p_s, p_l, cur.beta, cost);
  out.u_social = social_welfare(net, cost, p_s, cur.beta, cur.schedule);
  return out;
}

GameOutcome solve_social_welfare(const Network& net, const CostModel& cost,
                                 const SolveOptions& opts, const ScheduleMask& mask) {
  DevicePins pins = DevicePins::none(net);
  auto init = default_initial_strategy(net, cost, mask, &pins);
  if (!init) return no_trade(net, {});

  double p_s = follower_best_response(init->price, cost).power;
  double beta = init->beta;
  Schedule sched = init->schedule;

  std::vector<double> trace{welfare_of(net, cost, p_s, beta, sched)};
  bool converged = false;
  for (int n = 1; n <= opts.max_outer; ++n) {
    // Beacon-power block. The feasible set matches the price block of the
    // leader's problem under p_l = b_m + 2 a_m P_S.
    auto piv = price_interval(net, cost, beta, sched, mask, pins);
    if (!piv) return no_trade(net, std::move(trace));
    const Interval power_iv{(piv->lo - cost.b_m) / (2.0 * cost.a_m),
                            (piv->hi - cost.b_m) / (2.0 * cost.a_m)};
    p_s = maximize_scalar(welfare_power_objective(net, cost, beta, sched), power_iv, p_s,
                          opts.scalar_tol);

    {
      auto biv = beta_interval(net, cost, p_s, sched, mask);
      if (!biv) return no_trade(net, std::move(trace));
      beta = maximize_scalar(welfare_beta_objective(net, cost, p_s, sched), *biv, beta,
                             opts.scalar_tol);
    }

    auto s = solve_schedule_for_power(net, cost.price_per_bit, p_s, beta, mask, pins, sched);
    if (!s) return no_trade(net, std::move(trace));
    // The schedule solver maximizes revenue; the cost term is fixed at this
    // block, so it maximizes welfare too. Keep the better of the two.
    if (welfare_of(net, cost, p_s, beta, *s) >= welfare_of(net, cost, p_s, beta, sched)) {
      sched = *s;
    }

    const double w = welfare_of(net, cost, p_s, beta, sched);
    const double prev = trace.back();
    trace.push_back(w);
    if (std::abs(w - prev) < opts.tol_outer) {
      converged = true;
      break;
    }
  }

  GameOutcome out;
  out.strategy.price = cost.b_m + 2.0 * cost.a_m * p_s;
  out.strategy.beta = beta;
  out.strategy.schedule = sched;
  out.converged = converged;
  out.trace = std::move(trace);
  out.iterations = static_cast<int>(out.trace.size()) - 1;
  out.u_social = welfare_of(net, cost, p_s, beta, sched);
  out.negotiated = out.u_social > 0.0;
  if (!out.negotiated) {
    out.u_social = 0.0;
    return out;
  }
  out.p_s_star = p_s;
  out.u_leader = leader_utility(out.strategy, net, cost, p_s);
  out.u_follower = follower_utility(p_s, out.strategy.price, beta, cost);
  return out;
}

GameOutcome solve_fixed_mode(const Network& net, const CostModel& cost, FixedMode mode,
                             const SolveOptions& opts) {
  switch (mode) {
    case FixedMode::Bbcm:
      return pa_solve(net, cost, opts, ScheduleMask{true, false});
    case FixedMode::Httcm:
      return pa_solve(net, cost, opts, ScheduleMask{false, true});
    case FixedMode::Tdma:
      break;
  }
  // TDMA: rigid half/half frame with equal slots; only the price moves.
  const ScheduleMask mask{};
  DevicePins pins = DevicePins::none(net);
  auto init = default_initial_strategy(net, cost, mask, &pins);
  if (!init) return no_trade(net, {});

  LeaderStrategy cur = *init;
  std::vector<double> trace{
      leader_utility(cur, net, cost, follower_best_response(cur.price, cost).power)};
  bool converged = false;
  for (int n = 1; n <= opts.max_outer; ++n) {
    auto p = solve_price_step(net, cost, cur.price, cur.beta, cur.schedule, mask, pins, opts);
    if (!p) return no_trade(net, std::move(trace));
    cur.price = *p;
    const double u = leader_utility(cur, net, cost, follower_best_response(cur.price, cost).power);
    const double prev = trace.back();
    trace.push_back(u);
    if (std::abs(u - prev) < opts.tol_outer) {
      converged = true;
      break;
    }
  }
  return finalize_outcome(net, cost, cur, std::move(trace), converged);
}

double price_of_anarchy(const GameOutcome& equilibrium, const GameOutcome& welfare_optimum) {
  if (!equilibrium.negotiated || !welfare_optimum.negotiated) return 0.0;
  if (welfare_optimum.u_social <= kTimeEps) return 0.0;
  return std::clamp(equilibrium.u_social / welfare_optimum.u_social, 0.0, 1.0);
}

}  // namespace wpbc
