#include "wpbc/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wpbc/baselines.hpp"

namespace wpbc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

GameOutcome dispatch(const std::string& method, const Network& net, const CostModel& cost,
                     const SolveOptions& opts) {
  if (method == "pa") return pa_solve(net, cost, opts);
  if (method == "ja") return ja_solve(net, cost, opts);
  if (method == "fixed-price") return solve_fixed_price(net, cost, default_fixed_price(cost), opts);
  if (method == "welfare") return solve_social_welfare(net, cost, opts);
  if (method == "bbcm") return solve_fixed_mode(net, cost, FixedMode::Bbcm, opts);
  if (method == "httcm") return solve_fixed_mode(net, cost, FixedMode::Httcm, opts);
  if (method == "tdma") return solve_fixed_mode(net, cost, FixedMode::Tdma, opts);
  throw std::invalid_argument("unknown method: " + method);
}

/// Applies one sweep point to a copy of the scenario.
void apply_point(Scenario& sc, const SweepSpec& sweep, double value) {
  if (sweep.variable == "distance_m") {
    for (auto& d : sc.devices) d.d_bd = value;
  } else if (sweep.variable == "price_per_bit") {
    sc.cost.price_per_bit = value;
  } else if (sweep.variable == "device_count") {
    DeviceKind kind = DeviceKind::Awpd;
    if (sweep.kind == "pwpd") kind = DeviceKind::Pwpd;
    if (sweep.kind == "hwpd") kind = DeviceKind::Hwpd;
    Device tmpl;
    tmpl.kind = kind;
    for (const auto& d : sc.devices) {
      if (d.kind == kind) {
        tmpl = d;
        break;
      }
    }
    sc.devices.erase(std::remove_if(sc.devices.begin(), sc.devices.end(),
                                    [&](const Device& d) { return d.kind == kind; }),
                     sc.devices.end());
    const long n = std::lround(value);
    for (long i = 0; i < n; ++i) sc.devices.push_back(tmpl);
  }
}

}  // namespace

ResultRow run_method(const std::string& method, const Network& net, const CostModel& cost,
                     const SolveOptions& opts) {
  ResultRow row;
  row.method = method;
  const auto t0 = Clock::now();
  const GameOutcome out = dispatch(method, net, cost, opts);
  row.wall_ms = ms_since(t0);
  row.u_leader = out.u_leader;
  row.u_follower = out.u_follower;
  row.u_welfare = out.u_social;
  row.p_s_star = out.p_s_star;
  row.p_l_star = out.strategy.price;
  row.beta_star = out.strategy.beta;
  row.negotiated = out.negotiated;
  row.iterations = out.iterations;
  return row;
}

std::vector<ResultRow> run_sweep(const Scenario& scenario) {
  std::vector<double> points;
  if (scenario.sweep.variable == "none" || scenario.sweep.steps == 1) {
    points.push_back(scenario.sweep.variable == "none" ? 0.0 : scenario.sweep.from);
  } else {
    for (int i = 0; i < scenario.sweep.steps; ++i) {
      points.push_back(scenario.sweep.from + (scenario.sweep.to - scenario.sweep.from) * i /
                                                 double(scenario.sweep.steps - 1));
    }
  }

  std::vector<ResultRow> rows;
  for (double x : points) {
    Scenario point = scenario;
    if (scenario.sweep.variable != "none") apply_point(point, scenario.sweep, x);
    const Network net = point.network();

    // Welfare optimum anchors the PoA column for every method at this point.
    double welfare_best = 0.0;
    bool welfare_ok = false;
    std::optional<ResultRow> welfare_row;
    try {
      welfare_row = run_method("welfare", net, point.cost, point.solve);
      welfare_best = welfare_row->u_welfare;
      welfare_ok = welfare_row->negotiated && welfare_best > 0.0;
    } catch (const std::exception&) {
      welfare_row.reset();
    }

    for (const auto& method : point.methods) {
      ResultRow row;
      if (method == "welfare" && welfare_row) {
        row = *welfare_row;
      } else {
        try {
          row = run_method(method, net, point.cost, point.solve);
        } catch (const std::exception&) {
          row.method = method;
          row.iterations = -1;  // solver failure; sweep continues
        }
      }
      row.sweep_var = scenario.sweep.variable;
      row.sweep_value = x;
      if (welfare_ok && row.negotiated && row.iterations >= 0) {
        row.poa = std::clamp(row.u_welfare / welfare_best, 0.0, 1.0);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<BenchmarkStat> run_benchmark(const Scenario& scenario, int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("run_benchmark: repetitions must be >= 1");
  const Network net = scenario.network();
  std::vector<BenchmarkStat> stats;
  for (const auto& method : scenario.methods) {
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (int r = 0; r < repetitions; ++r) {
      const auto t0 = Clock::now();
      (void)dispatch(method, net, scenario.cost, scenario.solve);
      samples.push_back(ms_since(t0));
    }
    std::sort(samples.begin(), samples.end());
    BenchmarkStat s;
    s.method = method;
    s.devices = net.size();
    s.repetitions = repetitions;
    s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    const std::size_t idx = static_cast<std::size_t>(std::ceil(0.95 * samples.size())) - 1;
    s.p95_ms = samples[std::min(idx, samples.size() - 1)];
    stats.push_back(std::move(s));
  }
  return stats;
}

}  // namespace wpbc
