#pragma once

#include "wpbc/results.hpp"
#include "wpbc/scenario.hpp"

namespace wpbc {

/// Runs one method on one network and fills everything but the sweep columns.
/// Unknown method names throw std::invalid_argument.
ResultRow run_method(const std::string& method, const Network& net, const CostModel& cost,
                     const SolveOptions& opts);

/// Runs every selected method at every sweep point. Per-point solver failures
/// are recorded in-row (iterations = -1) and the sweep continues. With
/// sweep.variable == "none" there is a single point at sweep_value 0.
std::vector<ResultRow> run_sweep(const Scenario& scenario);

struct BenchmarkStat {
  std::string method;
  std::size_t devices = 0;
  int repetitions = 0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
};

/// Repeated timed solves of each selected method on the scenario's network.
std::vector<BenchmarkStat> run_benchmark(const Scenario& scenario, int repetitions);

}  // namespace wpbc
