#include "wpbc/solvers.hpp"

#include <cmath>
#include <limits>

namespace wpbc {

namespace {
constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2
}

ScalarResult golden_section_max(const ScalarProblem& prob) {
  if (prob.lower > prob.upper) throw std::domain_error("golden_section_max: lower > upper");
  if (prob.tolerance <= 0) throw std::domain_error("golden_section_max: tolerance must be > 0");

  double lo = prob.lower, hi = prob.upper;
  ScalarResult res;
  if (hi - lo <= prob.tolerance) {
    res.x = 0.5 * (lo + hi);
    res.value = prob.objective(res.x);
    return res;
  }
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = prob.objective(x1);
  double f2 = prob.objective(x2);
  while (hi - lo > prob.tolerance) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = prob.objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = prob.objective(x1);
    }
    ++res.iterations;
  }
  // Consider the bracket interior and both original bounds; boundary maxima
  // of monotone objectives must return the exact bound.
  const double xm = 0.5 * (lo + hi);
  const double fm = prob.objective(xm);
  const double flo = prob.objective(prob.lower);
  const double fhi = prob.objective(prob.upper);
  res.x = xm;
  res.value = fm;
  if (flo > res.value) { res.x = prob.lower; res.value = flo; }
  if (fhi > res.value) { res.x = prob.upper; res.value = fhi; }
  return res;
}

void LinearConstraintSet::add(const Eigen::VectorXd& a, double b) {
  if (a.size() != dim) throw std::invalid_argument("constraint row has wrong dimension");
  rows.push_back(a);
  bounds.push_back(b);
}

void LinearConstraintSet::add_single(Eigen::Index i, double c, double b) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
  a[i] = c;
  add(a, b);
}

double LinearConstraintSet::slack(std::size_t i, const Eigen::VectorXd& x) const {
  return bounds[i] - rows[i].dot(x);
}

double LinearConstraintSet::min_slack(const Eigen::VectorXd& x) const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) m = std::min(m, slack(i, x));
  return m;
}

bool LinearConstraintSet::feasible(const Eigen::VectorXd& x, double tol) const {
  return min_slack(x) >= -tol;
}

namespace {

/// One inner Newton maximization of t * f(x) + sum log(slack_i) from a
/// strictly feasible start. Returns the improved point.
Eigen::VectorXd newton_center(const ConcaveObjective& obj, const LinearConstraintSet& cons,
                              Eigen::VectorXd x, double t, const BarrierOptions& opts) {
  const auto m = cons.size();
  const Eigen::Index n = x.size();

  auto barrier_value = [&](const Eigen::VectorXd& p) -> double {
    double v = t * obj.value(p);
    if (!std::isfinite(v)) return -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double s = cons.slack(i, p);
      if (s <= 0) return -std::numeric_limits<double>::infinity();
      v += std::log(s);
    }
    return v;
  };

  for (int step = 0; step < opts.max_newton_steps; ++step) {
    Eigen::VectorXd g = t * obj.gradient(x);
    Eigen::MatrixXd h = t * obj.hessian(x);
    for (std::size_t i = 0; i < m; ++i) {
      const double s = cons.slack(i, x);
      g -= cons.rows[i] / s;
      h -= (cons.rows[i] * cons.rows[i].transpose()) / (s * s);
    }
    // Small regularization keeps the factorization well posed when the
    // objective is linear and few rows are near-active.
    h.diagonal().array() -= 1e-12 * (1.0 + h.cwiseAbs().maxCoeff());

    Eigen::LDLT<Eigen::MatrixXd> ldlt(-h);
    Eigen::VectorXd d = ldlt.solve(g);
    double decrement = g.dot(d);
    if (!std::isfinite(decrement) || decrement < 0) {
      d = g;  // fallback to gradient ascent
      decrement = g.squaredNorm();
    }
    if (0.5 * decrement < opts.newton_tolerance) break;

    // Largest step keeping strict feasibility.
    double alpha_max = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double ad = cons.rows[i].dot(d);
      if (ad > 0) alpha_max = std::min(alpha_max, 0.99 * cons.slack(i, x) / ad);
    }
    double alpha = alpha_max;
    const double f0 = barrier_value(x);
    int backtracks = 0;
    while (backtracks < 60) {
      const Eigen::VectorXd cand = x + alpha * d;
      const double fc = barrier_value(cand);
      if (fc > f0 + 1e-4 * alpha * decrement || (fc > f0 && alpha < 1e-12)) {
        x = cand;
        break;
      }
      alpha *= 0.5;
      ++backtracks;
    }
    if (backtracks >= 60) break;  // no ascent available; centered enough
    (void)n;
  }
  return x;
}

Eigen::VectorXd barrier_solve(const ConcaveObjective& obj, const LinearConstraintSet& cons,
                              Eigen::VectorXd x, const BarrierOptions& opts) {
  const double m = static_cast<double>(cons.size());
  double t = opts.t_initial;
  while (true) {
    x = newton_center(obj, cons, x, t, opts);
    if (m / t < opts.duality_gap) break;
    t *= opts.t_multiplier;
  }
  return x;
}

}  // namespace

std::optional<Eigen::VectorXd> find_interior_point(const LinearConstraintSet& cons,
                                                   const Eigen::VectorXd& hint) {
  const Eigen::Index n = cons.dim;
  // Extended problem over (x, s): maximize -s subject to a.x - s <= b and
  // -s <= 1; any point with s < 0 is strictly interior for the original set.
  // Rows are normalized to unit length so s is a geometric margin; otherwise a
  // row with tiny coefficients caps the optimal s below the solver's accuracy
  // and an interior point gets misreported as nonexistent.
  LinearConstraintSet ext(n + 1);
  double worst_rel_violation = 0.0;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const double scale = cons.rows[i].norm();
    if (scale <= 0.0) {
      if (cons.bounds[i] < 0.0) return std::nullopt;  // 0 <= negative: infeasible row
      continue;
    }
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    row.head(n) = cons.rows[i] / scale;
    row[n] = -1.0;
    const double bound = cons.bounds[i] / scale;
    ext.add(row, bound);
    worst_rel_violation = std::max(worst_rel_violation, row.head(n).dot(hint) - bound);
  }
  ext.add_single(n, -1.0, 1.0);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 1);
  z.head(n) = hint;
  z[n] = worst_rel_violation + 1.0;

  ConcaveObjective obj{
      [n](const Eigen::VectorXd& p) { return -p[n]; },
      [n](const Eigen::VectorXd& p) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(p.size());
        g[n] = -1.0;
        return g;
      },
      [](const Eigen::VectorXd& p) {
        return Eigen::MatrixXd::Zero(p.size(), p.size()).eval();
      }};
  BarrierOptions opts;
  opts.duality_gap = 1e-9;  // only need the sign of s, not high accuracy
  z = barrier_solve(obj, ext, z, opts);
  if (z[n] >= -1e-12) return std::nullopt;
  return z.head(n).eval();
}

Eigen::VectorXd concave_max_linear(const ConcaveObjective& obj, const LinearConstraintSet& cons,
                                   const Eigen::VectorXd& start, double tol,
                                   const BarrierOptions& opts_in) {
  if (start.size() != cons.dim) throw std::invalid_argument("start has wrong dimension");
  if (!cons.feasible(start, 1e-9)) {
    throw FeasibilityError("concave_max_linear: start point infeasible");
  }

  Eigen::VectorXd x = start;
  if (cons.min_slack(x) <= 1e-12) {
    auto interior = find_interior_point(cons, x);
    if (!interior) throw FeasibilityError("concave_max_linear: feasible region has empty interior");
    x = *interior;
  }

  BarrierOptions opts = opts_in;
  opts.duality_gap = std::min(opts.duality_gap, tol);
  x = barrier_solve(obj, cons, x, opts);
  return x;
}

CccpResult cccp_solve(const DcProblem& prob) {
  CccpResult res;
  Eigen::VectorXd v = prob.start;
  if (!prob.constraints.feasible(v, 1e-9)) {
    throw FeasibilityError("cccp_solve: start point infeasible");
  }
  auto full = [&](const Eigen::VectorXd& p) {
    return prob.concave.value(p) + prob.convex_value(p);
  };
  res.trace.push_back(full(v));

  for (int k = 1; k <= prob.max_iterations; ++k) {
    const Eigen::VectorXd grad_cvex = prob.convex_gradient(v);
    ConcaveObjective inner{
        [&](const Eigen::VectorXd& p) { return prob.concave.value(p) + p.dot(grad_cvex); },
        [&](const Eigen::VectorXd& p) {
          return (prob.concave.gradient(p) + grad_cvex).eval();
        },
        prob.concave.hessian};
    Eigen::VectorXd next;
    try {
      next = concave_max_linear(inner, prob.constraints, v);
    } catch (const FeasibilityError& e) {
      throw FeasibilityError(std::string(e.what()) + " (CCCP iteration " + std::to_string(k) + ")");
    }
    const double before = res.trace.back();
    const double after = full(next);
    res.iterations = k;
    if (after >= before) {
      v = next;
      res.trace.push_back(after);
    } else {
      res.trace.push_back(before);  // keep incumbent; inner solve was within noise
    }
    if (std::abs(res.trace.back() - before) < prob.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.point = v;
  return res;
}

}  // namespace wpbc
