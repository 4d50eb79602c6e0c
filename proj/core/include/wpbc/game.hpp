#pragma once

#include <string>
#include <vector>

#include "wpbc/throughput.hpp"

namespace wpbc {

/// ESP cost model F(x) = a_m x^2 + b_m x, plus the regulatory beacon-power
/// cap and the leader's revenue per delivered unit of data.
struct CostModel {
  double a_m = 1.0;          // currency / W^2 / frame, > 0
  double b_m = 0.1;          // currency / W / frame, >= 0
  double p_s_max = 4.0;      // W
  double price_per_bit = 0.5;  // p_r, currency per data unit

  /// Price that drives the follower exactly to the power cap: b_m + 2 a_m p_s_max.
  double price_cap() const { return b_m + 2.0 * a_m * p_s_max; }
};

void validate(const CostModel& cost);

/// The ISP's full decision: energy price, emitting period, schedule.
struct LeaderStrategy {
  double price = 0.0;  // p_l
  double beta = 0.0;
  Schedule schedule;
};

/// Outcome of one equilibrium (or baseline) solve.
struct GameOutcome {
  LeaderStrategy strategy;
  double p_s_star = 0.0;
  double u_leader = 0.0;
  double u_follower = 0.0;
  double u_social = 0.0;
  bool negotiated = false;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;  // leader utility per outer iteration, nondecreasing
};

struct FollowerResponse {
  double power = 0.0;
  bool below_cost = false;  // p_l < b_m: supplying would lose money
};

/// Closed-form follower optimum (p_l - b_m) / (2 a_m), unclamped; the cap
/// p_s <= p_s_max is a leader-side constraint.
FollowerResponse follower_best_response(double p_l, const CostModel& cost);

/// beta * (p_l p_s - a_m p_s^2 - b_m p_s).
double follower_utility(double p_s, double p_l, double beta, const CostModel& cost);

/// p_r * R_sum - p_l * beta * p_s at an explicit beacon power.
double leader_utility(const LeaderStrategy& strategy, const Network& net, const CostModel& cost,
                      double p_s);

/// Sum of both providers' profits: p_r R_sum - beta (a_m p_s^2 + b_m p_s).
double social_welfare(const Network& net, const CostModel& cost, double p_s, double beta,
                      const Schedule& sched);

enum class Constraint {
  BeaconPower,    // 0 <= P_S <= p_s_max
  TxPower,        // per-device transmit power window (active devices)
  Energy,         // per-device harvested-energy window
  BackscatterSnr, // kappa * P_S >= snr_min (backscatter devices)
  EmitWindow,     // sum theta + sum tau <= beta <= 1, tau_h <= beta
  SleepWindow,    // sum nu + sum mu <= 1 - beta
};

std::string to_string(Constraint c);

struct Violation {
  Constraint constraint;
  std::string detail;
  double margin = 0.0;  // amount by which the bound is exceeded
};

/// Evaluates all constraints with the beacon power given explicitly (used by
/// baselines where P_S is a free variable). Devices with zero scheduled time
/// impose no transmit-power or SNR demand.
std::vector<Violation> check_feasibility_power(const Network& net, const CostModel& cost,
                                               double p_s, double beta, const Schedule& sched);

/// Same with P_S = follower best response to strategy.price.
std::vector<Violation> check_feasibility(const LeaderStrategy& strategy, const Network& net,
                                         const CostModel& cost);

struct VerifyOptions {
  int follower_grid = 2001;
  int leader_grid = 21;      // perturbation points per coordinate
  double relative_span = 0.05;
  double tolerance = 1e-6;
};

struct VerifyReport {
  bool follower_ok = false;
  bool leader_ok = false;
  double follower_gap = 0.0;  // max U_F improvement found on the grid
  double leader_gap = 0.0;    // max feasible single-block improvement found
  int skipped_infeasible = 0; // perturbations outside the feasible set
  bool ok() const { return follower_ok && leader_ok; }
};

/// Numerical certificate for the equilibrium conditions: follower optimality
/// on a power grid and leader single-block local optimality under feasibility.
VerifyReport verify_stackelberg(const GameOutcome& outcome, const Network& net,
                                const CostModel& cost, const VerifyOptions& opts = {});

}  // namespace wpbc
