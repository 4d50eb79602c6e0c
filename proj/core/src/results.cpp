#include "wpbc/results.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wpbc {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string csv_header() {
  return "sweep_var,sweep_value,method,u_leader,u_follower,u_welfare,poa,"
         "p_s_star,p_l_star,beta_star,negotiated,iterations,wall_ms";
}

std::string to_csv_line(const ResultRow& r) {
  std::ostringstream out;
  out << r.sweep_var << ',' << format_double(r.sweep_value) << ',' << r.method << ','
      << format_double(r.u_leader) << ',' << format_double(r.u_follower) << ','
      << format_double(r.u_welfare) << ',' << format_double(r.poa) << ','
      << format_double(r.p_s_star) << ',' << format_double(r.p_l_star) << ','
      << format_double(r.beta_star) << ',' << (r.negotiated ? "true" : "false") << ','
      << r.iterations << ',' << format_double(r.wall_ms);
  return out.str();
}

std::string render_results(const std::vector<ResultRow>& rows, ResultFormat format,
                           const std::vector<std::string>& header_comments) {
  std::ostringstream out;
  for (const auto& c : header_comments) out << "# " << c << '\n';
  if (format == ResultFormat::Csv) {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << to_csv_line(r) << '\n';
    return out.str();
  }
  // Plot series: one block per (method, metric), rows as "x y" pairs in
  // sweep order, blocks separated by blank lines.
  static const std::array<std::pair<const char*, double ResultRow::*>, 5> metrics{{
      {"u_leader", &ResultRow::u_leader},
      {"u_follower", &ResultRow::u_follower},
      {"u_welfare", &ResultRow::u_welfare},
      {"poa", &ResultRow::poa},
      {"p_s_star", &ResultRow::p_s_star},
  }};
  std::vector<std::string> methods;
  for (const auto& r : rows) {
    bool known = false;
    for (const auto& m : methods) known = known || m == r.method;
    if (!known) methods.push_back(r.method);
  }
  for (const auto& m : methods) {
    for (const auto& [name, field] : metrics) {
      out << "## method=" << m << " metric=" << name << '\n';
      for (const auto& r : rows) {
        if (r.method != m) continue;
        out << format_double(r.sweep_value) << ' ' << format_double(r.*field) << '\n';
      }
      out << '\n';
    }
  }
  return out.str();
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& path,
                  ResultFormat format, const std::vector<std::string>& header_comments) {
  std::ofstream out(path, std::ios::binary);  // binary: identical bytes everywhere
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << render_results(rows, format, header_comments);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wpbc
