#include "quadgen/reduce.hpp"

#include <cmath>

#include "doctest.h"

using namespace quadgen;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MomentProblem uniform_problem_1d(int max_degree) {
  Measure mu = uniform_measure(Box::centered_cube(1));
  return make_tensor_problem(mu, MultiIndexSet::total_degree_set(1, max_degree));
}

// uniform x (3/4)(1-t^2) on [-1,1]^2 with the additive index set B0(1) n B1(n)
MomentProblem mixed_measure_problem(int n) {
  Measure mu = Measure::tensor({TensorFactor{Family::uniform, 0.0, 1.0},
                                TensorFactor{Family::jacobi11, 0.0, 1.0}});
  return make_tensor_problem(mu, MultiIndexSet::anova_set(2, 1, n));
}

}  // namespace

TEST_SUITE_BEGIN("reduce");

TEST_CASE("cluster basics") {
  MatrixXd x(2, 2);
  x << 0, 0, 2, 2;
  VectorXd w(2);
  w << 0.25, 0.75;
  auto [cx, cw] = cluster(x, w, 1);
  CHECK(cw[0] == doctest::Approx(1.0));
  CHECK(cx(0, 0) == doctest::Approx(1.5));
  CHECK(cx(0, 1) == doctest::Approx(1.5));

  w << 0.5, 0.5;
  auto [mx, mw] = cluster(x, w, 1);
  CHECK(mx(0, 0) == doctest::Approx(1.0));  // equal weights: midpoint

  MatrixXd x3(3, 1);
  x3 << 0, 1, 10;
  VectorXd w3(3);
  w3 << 0.1, 0.2, 0.7;
  auto [hx, hw] = cluster(x3, w3, 2);
  CHECK(hx(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(hw[0] == doctest::Approx(0.3));
  CHECK(hx(1, 0) == doctest::Approx(10.0));
  CHECK(hw[1] == doctest::Approx(0.7));
}

TEST_CASE("cluster conserves mass and stays in the hull") {
  RandomStream rng(3);
  MatrixXd x(40, 3);
  VectorXd w(40);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-1, 1);
    w[i] = rng.uniform(0.01, 1.0);
  }
  double mass = w.sum();
  auto [cx, cw] = cluster(x, w, 7);
  CHECK(cw.sum() == doctest::Approx(mass).epsilon(1e-14));
  CHECK(cw.minCoeff() > 0.0);
  CHECK(cx.cwiseAbs().maxCoeff() <= 1.0 + 1e-14);
}

TEST_CASE("refine exits immediately at an exact rule") {
  auto problem = uniform_problem_1d(3);
  auto g2 = gauss_rule(Recurrence::legendre(3), 2);
  MatrixXd x0 = g2.nodes;
  auto [rule, report] = refine(x0, g2.weights, problem);
  CHECK(report.final_objective < 1e-20);
  CHECK((rule.nodes - x0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(report.iterations == 0);
  CHECK(report.exit_reason == ExitReason::gradient_small);
}

TEST_CASE("refine recovers the perturbed gauss rule") {
  auto problem = uniform_problem_1d(3);
  auto g2 = gauss_rule(Recurrence::legendre(3), 2);
  MatrixXd x0 = g2.nodes;
  x0(0, 0) += 0.05;
  x0(1, 0) -= 0.05;
  auto [rule, report] = refine(x0, g2.weights, problem);
  CHECK(report.success);
  CHECK(report.final_objective < 1e-16);
  CHECK(rule.nodes(0, 0) == doctest::Approx(-std::sqrt(3.0) / 3.0).epsilon(1e-7));
  CHECK(rule.nodes(1, 0) == doctest::Approx(std::sqrt(3.0) / 3.0).epsilon(1e-7));
  CHECK(rule.weights[0] == doctest::Approx(0.5).epsilon(1e-7));

  // accepted objective values never increase
  for (std::size_t i = 1; i < report.trajectory.size(); ++i)
    CHECK(report.trajectory[i] <= report.trajectory[i - 1] * (1 + 1e-12));
}

TEST_CASE("refine rejects infeasible starts") {
  auto problem = uniform_problem_1d(3);
  MatrixXd x0(2, 1);
  x0 << -1.5, 0.5;
  VectorXd w0 = VectorXd::Constant(2, 0.5);
  CHECK_THROWS_AS(refine(x0, w0, problem), std::invalid_argument);
}

TEST_CASE("analytic gradient matches central differences") {
  RandomStream rng(17);
  for (int d : {1, 2, 3}) {
    Measure mu = uniform_measure(Box::centered_cube(d));
    auto problem = make_tensor_problem(mu, MultiIndexSet::total_degree_set(d, 4));
    const int m = 4;
    for (int trial = 0; trial < 4; ++trial) {
      MatrixXd x(m, d);
      VectorXd w(m);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < d; ++j) x(i, j) = rng.uniform(-0.9, 0.9);
        w[i] = rng.uniform(0.05, 0.5);
      }
      VectorXd grad;
      refine_objective(problem, x, w, &grad);

      const double h = 1e-6;
      int pos = 0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j, ++pos) {
          MatrixXd xp = x, xm = x;
          xp(i, j) += h;
          xm(i, j) -= h;
          double fd = (refine_objective(problem, xp, w) -
                       refine_objective(problem, xm, w)) / (2 * h);
          CHECK(std::abs(grad[pos] - fd) / std::max(1.0, std::abs(fd)) < 1e-5);
        }
      for (int i = 0; i < m; ++i) {
        VectorXd wp = w, wm = w;
        wp[i] += h;
        wm[i] -= h;
        double fd = (refine_objective(problem, x, wp) -
                     refine_objective(problem, x, wm)) / (2 * h);
        CHECK(std::abs(grad[m * d + i] - fd) / std::max(1.0, std::abs(fd)) < 1e-5);
      }
    }
  }
}

TEST_CASE("generate recovers univariate gauss rules") {
  auto problem = uniform_problem_1d(9);
  GenerateOptions opts;
  opts.seed = 5;
  auto rule = generate(problem, opts);
  REQUIRE(rule.size() == 5);
  CHECK(rule.metadata.success);

  auto ref = gauss_rule(Recurrence::legendre(6), 5);
  // nodes arrive unordered from the optimizer
  std::vector<int> order(5);
  for (int i = 0; i < 5; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return rule.nodes(a, 0) < rule.nodes(b, 0); });
  for (int i = 0; i < 5; ++i) {
    CHECK(rule.nodes(order[i], 0) == doctest::Approx(ref.nodes[i]).epsilon(1e-8));
    CHECK(rule.weights[order[i]] == doctest::Approx(ref.weights[i]).epsilon(1e-8));
  }
}

TEST_CASE("generate at desk scale: d=2 degree 10") {
  Measure mu = uniform_measure(Box::centered_cube(2));
  auto problem = make_tensor_problem(mu, MultiIndexSet::total_degree_set(2, 10));
  CHECK(problem.lambda().size() == 66);

  for (std::uint64_t seed : {1ull, 2ull}) {
    GenerateOptions opts;
    opts.seed = seed;
    RefineReport report;
    auto rule = generate(problem, opts, &report);
    CHECK(rule.metadata.success);
    CHECK(rule.size() <= 32);
    CHECK(rule.weights.minCoeff() >= 0.0);
    auto check = verify(rule, problem);
    CHECK(check.residual_l2 < 1e-8);
    CHECK(rule.metadata.increments_used <= 10);
    for (int i = 0; i < rule.size(); ++i)
      CHECK(problem.domain.contains(rule.nodes.row(i).transpose(), 1e-8));
  }
}

TEST_CASE("generate is deterministic per seed") {
  Measure mu = uniform_measure(Box::centered_cube(2));
  auto problem = make_tensor_problem(mu, MultiIndexSet::total_degree_set(2, 6));
  GenerateOptions opts;
  opts.seed = 77;
  auto a = generate(problem, opts);
  auto b = generate(problem, opts);
  CHECK((a.nodes - b.nodes).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("verify reports dropped-weight residuals linearly") {
  auto problem = uniform_problem_1d(5);
  auto g3 = gauss_rule(Recurrence::legendre(4), 3);
  QuadratureRule rule;
  rule.nodes = g3.nodes;
  rule.weights = g3.weights;
  auto exact = verify(rule, problem);
  CHECK(exact.residual_l2 < 1e-13);

  QuadratureRule damaged = rule;
  damaged.weights[1] = 0.0;
  auto broken = verify(damaged, problem);
  std::vector<double> basis_at_node(problem.lambda().size());
  Eigen::VectorXd x = rule.nodes.row(1);
  problem.basis.eval_point(x, basis_at_node.data());
  double expected = 0.0;
  for (double v : basis_at_node) expected += v * v;
  expected = g3.weights[1] * std::sqrt(expected);
  CHECK(broken.residual_l2 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("quasi-optimality report") {
  auto problem = uniform_problem_1d(9);
  auto g5 = gauss_rule(Recurrence::legendre(6), 5);
  QuadratureRule rule;
  rule.nodes = g5.nodes;
  rule.weights = g5.weights;
  auto report = quasi_optimality_report(rule, problem.lambda(),
                                        problem.basis.factors());
  CHECK(report.m == 5);
  CHECK(report.l == 5);
  CHECK(report.is_quasi_optimal);
  REQUIRE(report.weight_check.has_value());
  CHECK(*report.weight_check < 1e-10);

  // a 6-point rule for the same moments is not quasi-optimal
  auto g6 = gauss_rule(Recurrence::legendre(7), 6);
  QuadratureRule bigger;
  bigger.nodes = g6.nodes;
  bigger.weights = g6.weights;
  auto report6 = quasi_optimality_report(bigger, problem.lambda(),
                                         problem.basis.factors());
  CHECK_FALSE(report6.is_quasi_optimal);
  CHECK_FALSE(report6.weight_check.has_value());
}

TEST_CASE("diagonal gauss rules are exact") {
  // d=1 reduces to plain gauss
  Measure mu1 = uniform_measure(Box::centered_cube(1));
  auto diag1 = diagonal_gauss_rule(mu1, 5);
  auto ref = gauss_rule(Recurrence::legendre(4), 3);
  CHECK((diag1.nodes.col(0) - ref.nodes).cwiseAbs().maxCoeff() < 1e-14);

  // d=5, n=6: M=4 nodes, exact on all 31 additive moments
  Measure mu5 = uniform_measure(Box::centered_cube(5));
  auto lambda5 = MultiIndexSet::anova_set(5, 1, 6);
  CHECK(lambda5.size() == 31);
  auto problem5 = make_tensor_problem(mu5, lambda5);
  auto diag5 = diagonal_gauss_rule(mu5, 6);
  CHECK(diag5.size() == 4);
  CHECK(verify(diag5, problem5).residual_linf < 1e-12);

  // sign-flipped variant: exact and distinct from the all-plus rule
  Measure mu3 = uniform_measure(Box::centered_cube(3));
  auto lambda3 = MultiIndexSet::anova_set(3, 1, 4);
  auto problem3 = make_tensor_problem(mu3, lambda3);
  auto plus = diagonal_gauss_rule(mu3, 4);
  auto flipped = diagonal_gauss_rule(mu3, 4, {1, -1, 1});
  CHECK(verify(plus, problem3).residual_linf < 1e-12);
  CHECK(verify(flipped, problem3).residual_linf < 1e-12);
  CHECK((plus.nodes - flipped.nodes).cwiseAbs().maxCoeff() > 0.1);

  // quasi-optimal: the weight condition holds for every maximal half-set
  auto qreport = quasi_optimality_report(diag5, lambda5, problem5.basis.factors());
  CHECK(qreport.is_quasi_optimal);
  CHECK_FALSE(qreport.unique_half_set);
  REQUIRE(qreport.weight_check.has_value());
  CHECK(*qreport.weight_check < 1e-10);

  Measure mixed = Measure::tensor({TensorFactor{Family::uniform, 0.0, 1.0},
                                   TensorFactor{Family::jacobi11, 0.0, 1.0}});
  CHECK_THROWS_AS(diagonal_gauss_rule(mixed, 4), std::invalid_argument);
}

TEST_CASE("additive mixed-measure problem at the half-set size") {
  // With correctly normalized orthonormal families, the n=3 construction
  // admits an exact 2-point rule: nodes (+-1/sqrt3, +-1/sqrt5), weights 1/2.
  auto problem = mixed_measure_problem(3);
  MatrixXd x(2, 2);
  x << 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(5.0),
      -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(5.0);
  QuadratureRule rule;
  rule.nodes = x;
  rule.weights = VectorXd::Constant(2, 0.5);
  CHECK(verify(rule, problem).residual_linf < 1e-14);

  // n=5 is a genuine non-existence case: both marginals would have to be
  // the unique 3-point Gauss rules, whose weight vectors differ
  auto problem5 = mixed_measure_problem(5);
  int successes = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto mesh = candidate_mesh(problem5.domain, 700, seed);
    auto sol = nn_lasso(problem5.basis, mesh.points, problem5.moments, 1e-8);
    REQUIRE_FALSE(sol.support.empty());
    MatrixXd pts(sol.support.size(), 2);
    for (std::size_t i = 0; i < sol.support.size(); ++i)
      pts.row(i) = mesh.points.row(sol.support[i]);
    auto [cx, cw] = cluster(pts, sol.weights, 3);
    auto [rule5, report] = refine(cx, cw, problem5);
    if (report.success) ++successes;
  }
  CHECK(successes == 0);

  // while some M <= N = 11 succeeds (Tchakaloff)
  GenerateOptions opts;
  opts.seed = 9;
  auto found = generate(problem5, opts);
  CHECK(found.metadata.success);
  CHECK(found.size() <= 11);
}

TEST_SUITE_END();
