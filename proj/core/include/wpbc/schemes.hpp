#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "wpbc/game.hpp"
#include "wpbc/solvers.hpp"

namespace wpbc {

struct SolveOptions {
  double tol_outer = 1e-6;  // xi_1 on successive leader utilities
  double tol_cccp = 1e-8;   // xi_2 for the JA inner loop
  double scalar_tol = 1e-9; // golden-section x tolerance
  int max_outer = 500;
};

/// Which device functions participate; used by the fixed-mode baselines
/// (BBCM disables active transmission, HTTCM disables backscatter).
struct ScheduleMask {
  bool backscatter = true;
  bool active = true;
};

/// Devices excluded from the solve because their backscatter SNR floor made
/// the initial price interval empty. Decided once at initialization.
struct DevicePins {
  std::vector<bool> theta;  // per PWPD
  std::vector<bool> tau;    // per HWPD
  static DevicePins none(const Network& net);
  bool any() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool valid() const { return lo <= hi + 1e-15; }
  void clamp_to(double a, double b);
};

/// Feasible energy-price interval at fixed (beta, schedule); nullopt if empty.
std::optional<Interval> price_interval(const Network& net, const CostModel& cost, double beta,
                                       const Schedule& sched, const ScheduleMask& mask,
                                       const DevicePins& pins);

/// Feasible emitting-period interval at fixed (P_S, schedule). The beacon
/// power is explicit so baselines with a free P_S can reuse it.
std::optional<Interval> beta_interval(const Network& net, const CostModel& cost, double p_s,
                                      const Schedule& sched, const ScheduleMask& mask);

/// beta = 1/2 style equal split: backscatter window shared by unpinned
/// PWPDs+HWPDs, active window by AWPDs+HWPDs.
Schedule equal_split_schedule(const Network& net, double beta, const ScheduleMask& mask,
                              const DevicePins& pins);

/// G(p_l): leader utility at fixed (beta, schedule) as a function of price.
std::function<double(double)> build_price_objective(const Network& net, const CostModel& cost,
                                                    double beta_prev, const Schedule& sched_prev);

/// G_hat(beta): leader utility at fixed (p_l, schedule) as a function of beta.
std::function<double(double)> build_beta_objective(const Network& net, const CostModel& cost,
                                                   double p_l, const Schedule& sched_prev);

/// The concave schedule subproblem at fixed beacon power and beta. The
/// objective value includes `cost_constant`, so at a feasible point it equals
/// the corresponding utility (leader / fixed-price / welfare).
struct ScheduleProblem {
  ConcaveObjective objective;
  LinearConstraintSet constraints{0};
  // Variable index per device slot; -1 when pinned at zero.
  std::vector<int> theta_idx, nu_idx, tau_idx, mu_idx;
  Eigen::Index dim = 0;

  Schedule to_schedule(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_schedule(const Schedule& s) const;
};

ScheduleProblem build_schedule_problem(const Network& net, double price_per_bit, double p_s,
                                       double beta, const ScheduleMask& mask,
                                       const DevicePins& pins, double cost_constant);

/// One PA price step: golden-section maximization of G over the feasible
/// price interval. nullopt = negotiation-infeasible (empty interval).
std::optional<double> solve_price_step(const Network& net, const CostModel& cost, double p_l_prev,
                                       double beta_prev, const Schedule& sched_prev,
                                       const ScheduleMask& mask, const DevicePins& pins,
                                       const SolveOptions& opts);

std::optional<double> solve_beta_step(const Network& net, const CostModel& cost, double p_l,
                                      double beta_prev, const Schedule& sched_prev,
                                      const ScheduleMask& mask, const SolveOptions& opts);

/// Schedule step shared by both schemes and the baselines: maximizes the
/// concave time-allocation objective at fixed beacon power.
std::optional<Schedule> solve_schedule_for_power(const Network& net, double price_per_bit,
                                                 double p_s, double beta,
                                                 const ScheduleMask& mask, const DevicePins& pins,
                                                 const Schedule& incumbent);

std::optional<Schedule> solve_schedule_step(double p_l, double beta, const Network& net,
                                            const CostModel& cost, const ScheduleMask& mask,
                                            const DevicePins& pins, const Schedule& incumbent);

/// The JA joint (p_l, beta) subproblem after the change of variables
/// q1 = (p_l - b_m)(1 + beta)/2, q2 = (p_l - b_m)(1 - beta)/2.
struct JointProblem {
  DcProblem dc;
  double t_bs = 0.0;  // total backscatter time of the incumbent schedule
  double t_at = 0.0;  // total active time
  /// When the incumbent schedule saturates both windows, T_bs + T_at = 1
  /// forces beta to its incumbent value and the q-polytope loses its
  /// interior. The problem is then built on the 1-D slice q = slice * s.
  bool pinned_beta = false;
  Eigen::Vector2d slice = Eigen::Vector2d::Zero();

  Eigen::Vector2d q_of(const Eigen::VectorXd& point) const {
    return pinned_beta ? Eigen::Vector2d(slice * point[0]) : Eigen::Vector2d(point);
  }
};

Eigen::Vector2d q_from_price_beta(double p_l, double beta, const CostModel& cost);
/// Inverse map; at the no-trade corner q1 + q2 = 0 beta falls back to
/// `fallback_beta` and the price to b_m.
std::pair<double, double> price_beta_from_q(const Eigen::Vector2d& q, double fallback_beta,
                                            const CostModel& cost);

std::optional<JointProblem> build_joint_subproblem(double p_l_prev, double beta_prev,
                                                   const Schedule& sched_prev, const Network& net,
                                                   const CostModel& cost, const ScheduleMask& mask,
                                                   const DevicePins& pins,
                                                   const SolveOptions& opts);

/// Per-outer-iteration CCCP diagnostics collected by ja_solve.
struct JaDiagnostics {
  std::vector<std::vector<double>> inner_traces;
  std::vector<double> kkt_residuals;  // stationarity residual at each CCCP terminal point
};

/// Default initialization: beta = 1/2, equal split of both windows, price at
/// the midpoint of the feasible interval. Devices whose SNR floor cannot be
/// met get pinned (backscatter time fixed to zero). nullopt = no feasible
/// initialization exists (no-trade).
std::optional<LeaderStrategy> default_initial_strategy(const Network& net, const CostModel& cost,
                                                       const ScheduleMask& mask,
                                                       DevicePins* pins_out = nullptr);

GameOutcome pa_solve(const Network& net, const CostModel& cost, const SolveOptions& opts = {},
                     const ScheduleMask& mask = {});
GameOutcome pa_solve_from(const Network& net, const CostModel& cost, const LeaderStrategy& init,
                          const SolveOptions& opts = {}, const ScheduleMask& mask = {});

GameOutcome ja_solve(const Network& net, const CostModel& cost, const SolveOptions& opts = {},
                     const ScheduleMask& mask = {}, JaDiagnostics* diag = nullptr);
GameOutcome ja_solve_from(const Network& net, const CostModel& cost, const LeaderStrategy& init,
                          const SolveOptions& opts = {}, const ScheduleMask& mask = {},
                          JaDiagnostics* diag = nullptr);

/// Fills utilities/negotiated flag for a terminal strategy; shared with the
/// baselines so every GameOutcome is assembled identically.
GameOutcome finalize_outcome(const Network& net, const CostModel& cost,
                             const LeaderStrategy& strategy, std::vector<double> trace,
                             bool converged);

}  // namespace wpbc
