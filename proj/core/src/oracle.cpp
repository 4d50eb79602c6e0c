#include "wpbc/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wpbc {

namespace {

double objective_value(const Network& net, const CostModel& cost, OracleObjective objective,
                       double p_l, double p_s, double beta, const Schedule& sched) {
  if (objective == OracleObjective::Leader) {
    LeaderStrategy s;
    s.price = p_l;
    s.beta = beta;
    s.schedule = sched;
    return leader_utility(s, net, cost, p_s);
  }
  return social_welfare(net, cost, p_s, beta, sched);
}

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int n = 1;
  double at(int i) const { return n <= 1 ? lo : lo + (hi - lo) * i / double(n - 1); }
  double spacing() const { return n <= 1 ? 0.0 : (hi - lo) / double(n - 1); }
};

struct SlotAxis {
  bool backscatter = false;  // bounded by beta instead of 1 - beta
};

}  // namespace

long long GridSpec::total_points(std::size_t schedule_dim) const {
  long long total = fixed_price ? 1 : price_points;
  total *= beta_points;
  for (std::size_t i = 0; i < schedule_dim; ++i) {
    if (total > max_points / schedule_points) return max_points + 1;
    total *= schedule_points;
  }
  return total;
}

GridResult grid_search(const Network& net, const CostModel& cost, const GridSpec& spec,
                       OracleObjective objective) {
  const std::size_t P = net.pwpds.size(), A = net.awpds.size(), H = net.hwpds.size();
  const std::size_t dim = net.schedule_dim();
  if (spec.total_points(dim) > GridSpec::max_points) {
    throw std::invalid_argument("grid_search: grid exceeds the evaluation cap");
  }

  // Slot order matches Schedule: theta, nu, tau, mu.
  std::vector<SlotAxis> slots(dim);
  std::vector<double*> target(dim);
  Schedule sched = Schedule::zeros(A, P, H);
  {
    std::size_t k = 0;
    for (std::size_t p = 0; p < P; ++p, ++k) { slots[k].backscatter = true; target[k] = &sched.theta[p]; }
    for (std::size_t a = 0; a < A; ++a, ++k) { target[k] = &sched.nu[a]; }
    for (std::size_t h = 0; h < H; ++h, ++k) { slots[k].backscatter = true; target[k] = &sched.tau[h]; }
    for (std::size_t h = 0; h < H; ++h, ++k) { target[k] = &sched.mu[h]; }
  }

  Axis price_axis{cost.b_m, cost.price_cap(), spec.fixed_price ? 1 : spec.price_points};
  if (spec.fixed_price) price_axis = {*spec.fixed_price, *spec.fixed_price, 1};
  const Axis beta_axis{0.0, 1.0, spec.beta_points};

  GridResult best;
  best.value = -std::numeric_limits<double>::infinity();

  for (int ip = 0; ip < price_axis.n; ++ip) {
    const double p_l = price_axis.at(ip);
    const double p_s = follower_best_response(p_l, cost).power;
    for (int ib = 0; ib < beta_axis.n; ++ib) {
      const double beta = beta_axis.at(ib);

      // Depth-first over schedule slots with window-budget pruning; larger
      // grid indices only grow a slot, so one overrun ends that level.
      auto walk = [&](auto&& self, std::size_t depth, double bs_used, double at_used) -> void {
        if (depth == dim) {
          ++best.points;
          if (!check_feasibility_power(net, cost, p_s, beta, sched).empty()) return;
          ++best.feasible;
          const double v = objective_value(net, cost, objective, p_l, p_s, beta, sched);
          if (v > best.value) {
            best.value = v;
            best.strategy.price = p_l;
            best.strategy.beta = beta;
            best.strategy.schedule = sched;
            best.p_s = p_s;
            best.found = true;
          }
          return;
        }
        const bool bs = slots[depth].backscatter;
        const double budget = bs ? beta : 1.0 - beta;
        const double used = bs ? bs_used : at_used;
        for (int i = 0; i < spec.schedule_points; ++i) {
          const double v = budget * i / double(std::max(spec.schedule_points - 1, 1));
          if (used + v > budget + 1e-12) break;
          *target[depth] = v;
          self(self, depth + 1, bs ? bs_used + v : bs_used, bs ? at_used : at_used + v);
        }
        *target[depth] = 0.0;
      };
      walk(walk, 0, 0.0, 0.0);
    }
  }

  if (best.found) {
    // First-order discretization bound: |directional derivative| * spacing,
    // estimated with central differences at the best point.
    auto value_at = [&](double p_l, double beta, const Schedule& s) {
      const double p_s = objective == OracleObjective::Leader
                             ? follower_best_response(p_l, cost).power
                             : (p_l - cost.b_m) / (2.0 * cost.a_m);
      return objective_value(net, cost, objective, p_l, p_s, beta, s);
    };
    double err = 0.0;
    auto add_axis = [&](double spacing, auto eval) {
      if (spacing <= 0.0) return;
      const double h = 1e-6;
      const double d = (eval(h) - eval(-h)) / (2.0 * h);
      err += std::abs(d) * spacing * 0.5;
    };
    const auto& b = best.strategy;
    add_axis(price_axis.spacing(), [&](double h) { return value_at(b.price + h, b.beta, b.schedule); });
    add_axis(beta_axis.spacing(), [&](double h) { return value_at(b.price, b.beta + h, b.schedule); });
    for (std::size_t k = 0; k < dim; ++k) {
      const double budget = slots[k].backscatter ? b.beta : 1.0 - b.beta;
      const double spacing = budget / double(std::max(spec.schedule_points - 1, 1));
      add_axis(spacing, [&](double h) {
        Schedule s = b.schedule;
        double* v = nullptr;
        std::size_t kk = 0;
        for (std::size_t p = 0; p < P; ++p, ++kk) if (kk == k) v = &s.theta[p];
        for (std::size_t a = 0; a < A; ++a, ++kk) if (kk == k) v = &s.nu[a];
        for (std::size_t hh = 0; hh < H; ++hh, ++kk) if (kk == k) v = &s.tau[hh];
        for (std::size_t hh = 0; hh < H; ++hh, ++kk) if (kk == k) v = &s.mu[hh];
        *v = std::max(0.0, *v + h);
        return value_at(b.price, b.beta, s);
      });
    }
    best.discretization_error = err;
  }
  return best;
}

double local_improvement_check(const Network& net, const CostModel& cost,
                               const GameOutcome& outcome, OracleObjective objective,
                               double rel_step) {
  const LeaderStrategy& s = outcome.strategy;
  auto eval = [&](const LeaderStrategy& cand) -> std::optional<double> {
    const double p_s = objective == OracleObjective::Leader
                           ? follower_best_response(cand.price, cost).power
                           : outcome.p_s_star;
    if (!check_feasibility_power(net, cost, p_s, cand.beta, cand.schedule).empty()) {
      return std::nullopt;
    }
    return objective_value(net, cost, objective, cand.price, p_s, cand.beta, cand.schedule);
  };
  const auto base = eval(s);
  if (!base) return 0.0;

  double best_gain = 0.0;
  auto probe = [&](LeaderStrategy cand) {
    if (auto v = eval(cand)) best_gain = std::max(best_gain, *v - *base);
  };
  for (double sign : {1.0, -1.0}) {
    {
      LeaderStrategy c = s;
      c.price += sign * rel_step * (cost.price_cap() - cost.b_m);
      probe(c);
    }
    {
      LeaderStrategy c = s;
      c.beta = std::clamp(c.beta + sign * rel_step, 0.0, 1.0);
      probe(c);
    }
    auto probe_slot = [&](std::vector<double> Schedule::* field, std::size_t i) {
      LeaderStrategy c = s;
      double& v = (c.schedule.*field)[i];
      v = std::max(0.0, v + sign * rel_step);
      probe(c);
    };
    for (std::size_t p = 0; p < net.pwpds.size(); ++p) probe_slot(&Schedule::theta, p);
    for (std::size_t a = 0; a < net.awpds.size(); ++a) probe_slot(&Schedule::nu, a);
    for (std::size_t h = 0; h < net.hwpds.size(); ++h) {
      probe_slot(&Schedule::tau, h);
      probe_slot(&Schedule::mu, h);
    }
  }
  return best_gain;
}

}  // namespace wpbc
