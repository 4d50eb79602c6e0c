// Google-benchmark timings for the two equilibrium schemes and the shared
// inner solvers, across network sizes.

#include <benchmark/benchmark.h>

#include <string>

#include "wpbc/scenario.hpp"
#include "wpbc/schemes.hpp"

namespace {

wpbc::Scenario scenario_with(int per_kind) {
  const std::string n = std::to_string(per_kind);
  return wpbc::parse_scenario(
      "[devices]\n"
      "awpd_count = " + n + "\n"
      "pwpd_count = " + n + "\n"
      "hwpd_count = " + n + "\n");
}

void bench_pa(benchmark::State& state) {
  const wpbc::Scenario sc = scenario_with(static_cast<int>(state.range(0)));
  const wpbc::Network net = sc.network();
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpbc::pa_solve(net, sc.cost, sc.solve));
  }
  state.SetLabel(std::to_string(3 * state.range(0)) + " devices");
}

void bench_ja(benchmark::State& state) {
  const wpbc::Scenario sc = scenario_with(static_cast<int>(state.range(0)));
  const wpbc::Network net = sc.network();
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpbc::ja_solve(net, sc.cost, sc.solve));
  }
  state.SetLabel(std::to_string(3 * state.range(0)) + " devices");
}

void bench_schedule_step(benchmark::State& state) {
  const wpbc::Scenario sc = scenario_with(static_cast<int>(state.range(0)));
  const wpbc::Network net = sc.network();
  wpbc::DevicePins pins = wpbc::DevicePins::none(net);
  const auto init = wpbc::default_initial_strategy(net, sc.cost, {}, &pins);
  if (!init) {
    state.SkipWithError("no feasible initialization");
    return;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(wpbc::solve_schedule_step(init->price, init->beta, net, sc.cost, {},
                                                       pins, init->schedule));
  }
}

}  // namespace

BENCHMARK(bench_pa)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_ja)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_schedule_step)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
