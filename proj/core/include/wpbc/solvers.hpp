#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wpbc {

struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 1-D concave maximization problem on [lower, upper].
struct ScalarProblem {
  std::function<double(double)> objective;
  double lower = 0.0;
  double upper = 0.0;
  double tolerance = 1e-8;  // absolute x-tolerance
};

struct ScalarResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Golden-section search; exact for unimodal (concave) objectives, returns a
/// boundary point when the maximizer sits on a bound.
ScalarResult golden_section_max(const ScalarProblem& prob);

/// Inequality rows a . x <= b. Variable bounds are encoded as rows too.
struct LinearConstraintSet {
  Eigen::Index dim = 0;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> bounds;

  explicit LinearConstraintSet(Eigen::Index dimension = 0) : dim(dimension) {}
  void add(const Eigen::VectorXd& a, double b);
  /// Convenience: coefficient c on a single variable, c * x[i] <= b.
  void add_single(Eigen::Index i, double c, double b);
  std::size_t size() const { return rows.size(); }
  double slack(std::size_t i, const Eigen::VectorXd& x) const;
  double min_slack(const Eigen::VectorXd& x) const;
  bool feasible(const Eigen::VectorXd& x, double tol = 1e-9) const;
};

/// Concave objective with analytic first and second derivatives.
struct ConcaveObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

struct BarrierOptions {
  double t_initial = 1.0;
  double t_multiplier = 10.0;
  double newton_tolerance = 1e-8;
  double duality_gap = 1e-9;  // stop when m / t < this
  int max_newton_steps = 200;
};

/// Log-barrier interior-point maximization of a concave objective over
/// a . x <= b. `start` must be feasible; a weakly feasible start is nudged
/// to the interior with a phase-1 pass.
Eigen::VectorXd concave_max_linear(const ConcaveObjective& obj, const LinearConstraintSet& cons,
                                   const Eigen::VectorXd& start, double tol = 1e-9,
                                   const BarrierOptions& opts = {});

/// Phase-1: returns a strictly interior point of the polytope, or nullopt
/// when the feasible region has empty interior.
std::optional<Eigen::VectorXd> find_interior_point(const LinearConstraintSet& cons,
                                                   const Eigen::VectorXd& hint);

/// DC program: maximize Q_ccav(V) + Q_cvex(V) over a polytope, Q_ccav concave
/// and Q_cvex convex.
struct DcProblem {
  ConcaveObjective concave;
  std::function<double(const Eigen::VectorXd&)> convex_value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> convex_gradient;
  LinearConstraintSet constraints;
  Eigen::VectorXd start;
  double tolerance = 1e-8;  // xi_2 on successive objective values
  int max_iterations = 200;
};

struct CccpResult {
  Eigen::VectorXd point;
  std::vector<double> trace;  // full objective per iteration, nondecreasing
  bool converged = false;
  int iterations = 0;
};

/// Convex-concave procedure: V_k = argmax Q_ccav(V) + V . grad Q_cvex(V_{k-1}).
CccpResult cccp_solve(const DcProblem& prob);

}  // namespace wpbc
