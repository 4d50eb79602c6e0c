#pragma once

#include <optional>

#include "wpbc/game.hpp"

namespace wpbc {

enum class OracleObjective {
  Leader,   // p_r R_sum - p_l beta P_S with P_S the follower response
  Welfare,  // p_r R_sum - beta (a_m P_S^2 + b_m P_S), P_S a free axis
};

/// Brute-force grid over (price-or-power, beta, schedule). Deliberately slow
/// and independent of the iterative solvers; used as a correctness reference.
struct GridSpec {
  int price_points = 50;          // doubles as the P_S axis for Welfare
  int beta_points = 25;
  int schedule_points = 8;        // per schedule variable
  std::optional<double> fixed_price;  // collapses the price axis

  static constexpr long long max_points = 10'000'000;
  long long total_points(std::size_t schedule_dim) const;
};

struct GridResult {
  LeaderStrategy strategy;
  double p_s = 0.0;
  double value = 0.0;
  bool found = false;       // at least one feasible grid point
  long long points = 0;     // grid points visited
  long long feasible = 0;
  /// |grad| . spacing at the best point; a first-order bound on how far the
  /// true optimum can sit above the best grid value.
  double discretization_error = 0.0;
};

/// Exhaustive search with a feasibility filter. Iteration order is fixed, and
/// ties keep the earlier point, so results are deterministic. Throws
/// std::invalid_argument when the grid exceeds `max_points`.
GridResult grid_search(const Network& net, const CostModel& cost, const GridSpec& spec,
                       OracleObjective objective);

/// Largest objective gain over coordinate perturbations of `outcome` (both
/// signs, feasible points only). Near-zero means no local improvement exists.
double local_improvement_check(const Network& net, const CostModel& cost,
                               const GameOutcome& outcome,
                               OracleObjective objective = OracleObjective::Leader,
                               double rel_step = 1e-3);

}  // namespace wpbc
