#include "doctest.h"
#include "wpbc/solvers.hpp"

#include <Eigen/Dense>
#include <cmath>

using namespace wpbc;

TEST_CASE("golden section maximization") {
  SUBCASE("interior parabola vertex") {
    auto f = [](double x) { return -(x - 2.0) * (x - 2.0); };
    const auto r = golden_section_max({f, 0.0, 5.0, 1e-8});
    CHECK(r.x == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-10));
  }

  SUBCASE("boundary maximum is returned exactly") {
    auto f = [](double x) { return x; };
    const auto r = golden_section_max({f, 0.0, 1.0, 1e-8});
    CHECK(r.x == 1.0);
    CHECK(r.value == 1.0);
  }

  SUBCASE("degenerate interval") {
    auto f = [](double x) { return std::sin(x); };
    const auto r = golden_section_max({f, 0.7, 0.7, 1e-8});
    CHECK(r.x == 0.7);
  }

  SUBCASE("input validation") {
    auto f = [](double x) { return x; };
    CHECK_THROWS_AS(golden_section_max({f, 1.0, 0.0, 1e-8}), std::domain_error);
    CHECK_THROWS_AS(golden_section_max({f, 0.0, 1.0, 0.0}), std::domain_error);
  }
}

namespace {

ConcaveObjective quadratic_down() {
  return {
      [](const Eigen::VectorXd& x) { return -x.squaredNorm(); },
      [](const Eigen::VectorXd& x) { return (-2.0 * x).eval(); },
      [](const Eigen::VectorXd& x) {
        return (-2.0 * Eigen::MatrixXd::Identity(x.size(), x.size())).eval();
      }};
}

ConcaveObjective log_sum() {
  return {
      [](const Eigen::VectorXd& x) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) v += std::log1p(x[i]);
        return v;
      },
      [](const Eigen::VectorXd& x) {
        Eigen::VectorXd g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = 1.0 / (1.0 + x[i]);
        return g;
      },
      [](const Eigen::VectorXd& x) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) h(i, i) = -1.0 / ((1.0 + x[i]) * (1.0 + x[i]));
        return h;
      }};
}

LinearConstraintSet simplex(Eigen::Index n) {
  LinearConstraintSet cons(n);
  for (Eigen::Index i = 0; i < n; ++i) cons.add_single(i, -1.0, 0.0);  // x >= 0
  cons.add(Eigen::VectorXd::Ones(n), 1.0);                             // sum <= 1
  return cons;
}

}  // namespace

TEST_CASE("barrier maximization over a polytope") {
  SUBCASE("unconstrained optimum inside the set") {
    const Eigen::Index n = 3;
    Eigen::VectorXd start = Eigen::VectorXd::Constant(n, 0.2);
    const Eigen::VectorXd x = concave_max_linear(quadratic_down(), simplex(n), start);
    // The barrier keeps the iterate a hair inside the x >= 0 walls.
    CHECK(x.norm() < 1e-4);
  }

  SUBCASE("symmetric log objective lands on the equal split") {
    const Eigen::Index n = 4;
    Eigen::VectorXd start = Eigen::VectorXd::Constant(n, 0.1);
    const Eigen::VectorXd x = concave_max_linear(log_sum(), simplex(n), start);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(0.25).epsilon(1e-5));
  }

  SUBCASE("infeasible start is rejected") {
    Eigen::VectorXd start = Eigen::VectorXd::Constant(2, 2.0);
    CHECK_THROWS_AS(concave_max_linear(quadratic_down(), simplex(2), start), FeasibilityError);
  }
}

TEST_CASE("interior point search") {
  SUBCASE("finds an interior point from a boundary hint") {
    const auto cons = simplex(3);
    Eigen::VectorXd boundary(3);
    boundary << 1.0, 0.0, 0.0;  // on two faces at once
    const auto p = find_interior_point(cons, boundary);
    REQUIRE(p.has_value());
    CHECK(cons.min_slack(*p) > 0.0);
  }

  SUBCASE("reports genuinely empty interiors") {
    LinearConstraintSet cons(1);
    cons.add_single(0, 1.0, 0.5);
    cons.add_single(0, -1.0, -0.5);  // forces x == 0.5
    const auto p = find_interior_point(cons, Eigen::VectorXd::Constant(1, 0.5));
    CHECK_FALSE(p.has_value());
  }

  SUBCASE("badly scaled rows do not hide the interior") {
    // A tiny-coefficient row caps the absolute margin far below the solver's
    // duality gap; the relative-margin formulation must still find the point.
    LinearConstraintSet cons(1);
    cons.add_single(0, 1e-6, 1e-7);    // x <= 0.1
    cons.add_single(0, -1e-6, -1e-8);  // x >= 0.01
    Eigen::VectorXd hint = Eigen::VectorXd::Constant(1, 0.01);
    const auto p = find_interior_point(cons, hint);
    REQUIRE(p.has_value());
    CHECK((*p)[0] > 0.01);
    CHECK((*p)[0] < 0.1);
  }
}

TEST_CASE("convex-concave procedure") {
  SUBCASE("degenerate DC with zero convex part") {
    DcProblem prob;
    prob.concave = quadratic_down();
    prob.convex_value = [](const Eigen::VectorXd&) { return 0.0; };
    prob.convex_gradient = [](const Eigen::VectorXd& x) {
      return Eigen::VectorXd::Zero(x.size()).eval();
    };
    prob.constraints = simplex(2);
    prob.start = Eigen::VectorXd::Constant(2, 0.3);
    const auto r = cccp_solve(prob);
    CHECK(r.point.norm() == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(r.converged);
  }

  SUBCASE("1-D DC sum -x^2/2 converges to the origin") {
    // concave part -x^2, convex part +x^2/2; optimum of the sum is x = 0.
    DcProblem prob;
    prob.concave = {
        [](const Eigen::VectorXd& x) { return -x.squaredNorm(); },
        [](const Eigen::VectorXd& x) { return (-2.0 * x).eval(); },
        [](const Eigen::VectorXd& x) {
          return (-2.0 * Eigen::MatrixXd::Identity(x.size(), x.size())).eval();
        }};
    prob.convex_value = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
    prob.convex_gradient = [](const Eigen::VectorXd& x) { return x.eval(); };
    LinearConstraintSet cons(1);
    cons.add_single(0, 1.0, 1.0);    // x <= 1
    cons.add_single(0, -1.0, 1.0);   // x >= -1
    prob.constraints = cons;
    prob.start = Eigen::VectorXd::Constant(1, 1.0);
    const auto r = cccp_solve(prob);
    CHECK(r.point[0] == doctest::Approx(0.0).epsilon(1e-4));
    // The full objective trace never decreases.
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-9);
  }
}
