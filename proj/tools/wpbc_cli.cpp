// Command-line front end: solve / sweep / benchmark / verify over scenario
// files. Exit codes: 0 ok, 1 usage, 2 invalid scenario, 3 solver failure.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "wpbc/baselines.hpp"
#include "wpbc/oracle.hpp"
#include "wpbc/results.hpp"
#include "wpbc/scenario.hpp"
#include "wpbc/sweep.hpp"

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string methods;
  std::string out_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("scenario", args.scenario_path, "Scenario file")->required();
  cmd->add_option("--methods", args.methods,
                  "Comma-separated subset of: pa,ja,fixed-price,welfare,bbcm,httcm,tdma");
  cmd->add_option("--out", args.out_path, "Output file (default: stdout)");
  cmd->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "plot"}));
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
}

wpbc::Scenario load(const CommonArgs& args) {
  wpbc::Scenario sc = wpbc::load_scenario(args.scenario_path);
  if (!args.methods.empty()) {
    std::vector<std::string> methods;
    std::stringstream ss(args.methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (std::find(wpbc::known_methods().begin(), wpbc::known_methods().end(), item) ==
          wpbc::known_methods().end()) {
        throw wpbc::ScenarioError("unknown method in --methods: " + item);
      }
      methods.push_back(item);
    }
    if (methods.empty()) throw wpbc::ScenarioError("--methods: empty list");
    sc.methods = std::move(methods);
  }
  if (args.seed) sc.seed = *args.seed;
  return sc;
}

std::vector<std::string> header_comments(const wpbc::Scenario& sc) {
  std::vector<std::string> lines;
  lines.push_back("seed = " + std::to_string(sc.seed));
  for (const auto& d : sc.applied_defaults) lines.push_back("default: " + d);
  return lines;
}

void write_out(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

int run_rows(const CommonArgs& args, bool single_point) {
  wpbc::Scenario sc = load(args);
  if (single_point) sc.sweep = wpbc::SweepSpec{};  // solve = sweep with one point
  const auto rows = wpbc::run_sweep(sc);
  const auto fmt = args.format == "plot" ? wpbc::ResultFormat::PlotSeries : wpbc::ResultFormat::Csv;
  write_out(wpbc::render_results(rows, fmt, header_comments(sc)), args.out_path);
  for (const auto& r : rows) {
    if (r.iterations < 0) return 3;
  }
  return 0;
}

int run_benchmark_cmd(const CommonArgs& args, int reps) {
  const wpbc::Scenario sc = load(args);
  const auto stats = wpbc::run_benchmark(sc, reps);
  std::ostringstream out;
  out << "method,devices,repetitions,mean_ms,p95_ms\n";
  for (const auto& s : stats) {
    out << s.method << ',' << s.devices << ',' << s.repetitions << ','
        << wpbc::format_double(s.mean_ms) << ',' << wpbc::format_double(s.p95_ms) << '\n';
  }
  write_out(out.str(), args.out_path);
  return 0;
}

int run_verify(const CommonArgs& args) {
  const wpbc::Scenario sc = load(args);
  const wpbc::Network net = sc.network();
  std::ostringstream out;
  bool ok = true;

  for (const char* method : {"pa", "ja"}) {
    const wpbc::GameOutcome res = std::string(method) == "pa"
                                      ? wpbc::pa_solve(net, sc.cost, sc.solve)
                                      : wpbc::ja_solve(net, sc.cost, sc.solve);
    out << method << ": u_leader=" << wpbc::format_double(res.u_leader)
        << " negotiated=" << (res.negotiated ? "true" : "false")
        << " iterations=" << res.iterations << '\n';
    if (res.negotiated) {
      const auto report = wpbc::verify_stackelberg(res, net, sc.cost);
      out << method << ": follower_gap=" << wpbc::format_double(report.follower_gap)
          << " leader_gap=" << wpbc::format_double(report.leader_gap)
          << " certificate=" << (report.ok() ? "pass" : "FAIL") << '\n';
      ok = ok && report.ok();

      const double gain =
          wpbc::local_improvement_check(net, sc.cost, res, wpbc::OracleObjective::Leader);
      out << method << ": local_improvement=" << wpbc::format_double(gain) << '\n';
      ok = ok && gain <= 1e-5;
    }
    wpbc::GridSpec grid;
    if (grid.total_points(net.schedule_dim()) <= wpbc::GridSpec::max_points) {
      const auto oracle = wpbc::grid_search(net, sc.cost, grid, wpbc::OracleObjective::Leader);
      if (oracle.found) {
        const double slack = std::max(2e-2, oracle.discretization_error);
        out << method << ": oracle_best=" << wpbc::format_double(oracle.value)
            << " slack=" << wpbc::format_double(slack) << '\n';
        ok = ok && res.u_leader >= oracle.value - slack;
      }
    } else {
      out << method << ": oracle skipped (grid over evaluation cap)\n";
    }
  }
  out << (ok ? "verify: pass\n" : "verify: FAIL\n");
  write_out(out.str(), args.out_path);
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg energy-trading solver for wireless-powered backscatter networks"};
  app.require_subcommand(1);

  CommonArgs solve_args, sweep_args, bench_args, verify_args;
  int reps = 10;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the scenario at its base point");
  add_common(solve_cmd, solve_args);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run the scenario's sweep");
  add_common(sweep_cmd, sweep_args);
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "Timed repeated solves");
  add_common(bench_cmd, bench_args);
  bench_cmd->add_option("--reps", reps, "Repetitions per method")->check(CLI::PositiveNumber);
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Equilibrium certificate + grid oracle on a small instance");
  add_common(verify_cmd, verify_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve_cmd->parsed()) return run_rows(solve_args, true);
    if (sweep_cmd->parsed()) return run_rows(sweep_args, false);
    if (bench_cmd->parsed()) return run_benchmark_cmd(bench_args, reps);
    return run_verify(verify_args);
  } catch (const wpbc::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
