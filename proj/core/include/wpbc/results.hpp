#pragma once

#include <string>
#include <vector>

namespace wpbc {

/// One (sweep value x method) outcome. `iterations == -1` marks a solver
/// failure at that point; the sweep keeps going.
struct ResultRow {
  std::string sweep_var = "none";
  double sweep_value = 0.0;
  std::string method;
  double u_leader = 0.0;
  double u_follower = 0.0;
  double u_welfare = 0.0;
  double poa = 0.0;
  double p_s_star = 0.0;
  double p_l_star = 0.0;
  double beta_star = 0.0;
  bool negotiated = false;
  int iterations = 0;
  double wall_ms = 0.0;
};

enum class ResultFormat { Csv, PlotSeries };

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

/// The fixed column list, comma-joined.
std::string csv_header();
std::string to_csv_line(const ResultRow& row);

/// Renders all rows: CSV with the fixed header, or per-method/per-metric
/// (x, y) series blocks for external plotting. `header_comments` lines are
/// prefixed with '#' (CSV) and emitted before the data.
std::string render_results(const std::vector<ResultRow>& rows, ResultFormat format,
                           const std::vector<std::string>& header_comments = {});

/// Writes render_results to `path`; throws std::runtime_error on I/O failure.
void emit_results(const std::vector<ResultRow>& rows, const std::string& path,
                  ResultFormat format, const std::vector<std::string>& header_comments = {});

}  // namespace wpbc
