#include "quadgen/l1init.hpp"

#include <cmath>

#include "quadgen/moments.hpp"
#include "doctest.h"

using namespace quadgen;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_SUITE_BEGIN("l1init");

TEST_CASE("candidate mesh stays in the domain") {
  Domain box = Domain::make_box(Box::centered_cube(2));
  auto mesh = candidate_mesh(box, 4, 17);
  CHECK(mesh.points.rows() == 4);
  for (int i = 0; i < 4; ++i) CHECK(box.contains(mesh.points.row(i).transpose()));

  // deterministic per seed
  auto mesh2 = candidate_mesh(box, 4, 17);
  CHECK((mesh.points - mesh2.points).cwiseAbs().maxCoeff() == 0.0);

  // uniform over the zonotope square: CLT bound on the mean
  Domain square = zonotope_build(MatrixXd::Identity(2, 2), 100, 3);
  auto zm = candidate_mesh(square, 100000, 5);
  double sigma = 1.0 / std::sqrt(3.0) / std::sqrt(100000.0);
  CHECK(std::abs(zm.points.col(0).mean()) < 4.0 * sigma);
  CHECK(std::abs(zm.points.col(1).mean()) < 4.0 * sigma);
  for (int i = 0; i < 200; ++i) CHECK(square.contains(zm.points.row(i).transpose(), 1e-10));
}

TEST_CASE("identity system returns the moments themselves") {
  MatrixXd phi = MatrixXd::Identity(6, 6);
  VectorXd m(6);
  m << 0.5, 0.0, 1.25, 0.0, 0.3, 2.0;
  auto sol = nn_lasso(phi, m, 0.0);
  CHECK_FALSE(sol.stalled);
  CHECK(sol.support.size() == 4);
  for (std::size_t i = 0; i < sol.support.size(); ++i)
    CHECK(sol.weights[i] == doctest::Approx(m[sol.support[i]]).epsilon(1e-14));
  CHECK(sol.residual_linf < 1e-14);
}

TEST_CASE("exact univariate rule recovered from a mesh containing gauss nodes") {
  auto lambda = MultiIndexSet::total_degree_set(1, 5);
  Measure mu = uniform_measure(Box::centered_cube(1));
  auto problem = make_tensor_problem(mu, lambda);

  auto mesh = candidate_mesh(mu.domain(), 100, 8);
  auto gauss3 = gauss_rule(Recurrence::legendre(4), 3);
  MatrixXd points(103, 1);
  points.topRows(100) = mesh.points;
  points.bottomRows(3) = gauss3.nodes;

  auto sol = nn_lasso(problem.basis, points, problem.moments, 1e-12);
  CHECK_FALSE(sol.stalled);
  CHECK(sol.residual_linf <= 1e-12);
  CHECK(sol.support.size() <= 6);  // Tchakaloff bound N = 6
  for (int i = 0; i < sol.weights.size(); ++i) CHECK(sol.weights[i] > 0.0);
}

TEST_CASE("sign-infeasible moments stall with positive residual") {
  // first row of Phi is all ones, so m = -e1 is unreachable with w >= 0
  MatrixXd phi(3, 50);
  phi.row(0).setOnes();
  phi.row(1).setRandom();
  phi.row(2).setRandom();
  VectorXd m = VectorXd::Zero(3);
  m[0] = -1.0;
  auto sol = nn_lasso(phi, m, 1e-10);
  CHECK(sol.stalled);
  CHECK(sol.residual_linf >= 1.0 - 1e-12);
}

TEST_CASE("random feasible systems are matched with small support") {
  RandomStream rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10, s = 200;
    MatrixXd phi(n, s);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < s; ++k) phi(i, k) = rng.normal();
    phi.row(0).setOnes();  // constant moment row keeps the cone pointed
    VectorXd w_true = VectorXd::Zero(s);
    for (int j = 0; j < 5; ++j)
      w_true[static_cast<int>(rng.integer(s))] = rng.uniform(0.1, 1.0);
    VectorXd m = phi * w_true;

    auto sol = nn_lasso(phi, m, 1e-9);
    CHECK_FALSE(sol.stalled);
    CHECK(sol.residual_linf <= 1e-9);
    CHECK(static_cast<int>(sol.support.size()) <= n);
    for (int i = 0; i < sol.weights.size(); ++i) CHECK(sol.weights[i] > 0.0);
  }
}

TEST_CASE("reruns are bit-identical") {
  auto lambda = MultiIndexSet::total_degree_set(2, 4);
  Measure mu = uniform_measure(Box::centered_cube(2));
  auto problem = make_tensor_problem(mu, lambda);
  auto mesh = candidate_mesh(mu.domain(), 300, 123);

  auto a = nn_lasso(problem.basis, mesh.points, problem.moments, 1e-10);
  auto b = nn_lasso(problem.basis, mesh.points, problem.moments, 1e-10);
  REQUIRE(a.support.size() == b.support.size());
  CHECK(a.support == b.support);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.residual_linf == b.residual_linf);
}

TEST_SUITE_END();
