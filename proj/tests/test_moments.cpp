#include "quadgen/moments.hpp"

#include <cmath>

#include "doctest.h"

using namespace quadgen;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_SUITE_BEGIN("moments");

TEST_CASE("tensor moments of the self-basis are e1") {
  for (Family fam : {Family::uniform, Family::jacobi11, Family::gaussian}) {
    std::vector<TensorFactor> factors{{fam, 0.0, 1.0}, {fam, 1.5, 0.25}};
    Measure mu = Measure::tensor(factors);
    auto problem = make_tensor_problem(mu, MultiIndexSet::total_degree_set(2, 5));
    CHECK(problem.moments[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (int n = 1; n < problem.moments.size(); ++n)
      CHECK(std::abs(problem.moments[n]) < 1e-13);
  }
}

TEST_CASE("tensor moments in the monomial basis") {
  Measure mu = uniform_measure(Box::centered_cube(2));
  auto lambda = MultiIndexSet::total_degree_set(2, 4);
  TensorBasis mono(lambda, {Basis1d::monomial(), Basis1d::monomial()});
  VectorXd m = tensor_moments(mu, mono);
  for (int n = 0; n < lambda.size(); ++n) {
    double expect = 1.0;
    for (int j = 0; j < 2; ++j)
      expect *= lambda[n][j] % 2 ? 0.0 : 1.0 / (lambda[n][j] + 1);
    CHECK(m[n] == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("sample moments basics") {
  auto lambda = MultiIndexSet::total_degree_set(2, 3);
  std::vector<Basis1d> legs{Basis1d::orthonormal(Recurrence::legendre(5)),
                            Basis1d::orthonormal(Recurrence::legendre(5))};
  TensorBasis basis(lambda, legs);

  MatrixXd origin = MatrixXd::Zero(1, 2);
  VectorXd m = sample_moments(origin, basis);
  CHECK(m[0] == 1.0);
  for (int n = 0; n < lambda.size(); ++n)
    if (total_degree(lambda[n]) % 2 == 1) CHECK(m[n] == 0.0);
}

TEST_CASE("sample moments converge to tensor moments") {
  Measure mu = uniform_measure(Box::centered_cube(2));
  auto lambda = MultiIndexSet::total_degree_set(2, 6);
  auto problem = make_tensor_problem(mu, lambda);

  MatrixXd samples = mu.sample(1000000, 2024);
  VectorXd m = sample_moments(samples, problem.basis);
  CHECK((m - problem.moments).cwiseAbs().maxCoeff() < 5e-3);
}

TEST_CASE("sample moment error halves when P quadruples") {
  Measure mu = uniform_measure(Box::centered_cube(2));
  auto lambda = MultiIndexSet::total_degree_set(2, 4);
  auto problem = make_tensor_problem(mu, lambda);

  double err_small = 0.0, err_large = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    VectorXd small = sample_moments(mu.sample(2000, 100 + seed), problem.basis);
    VectorXd large = sample_moments(mu.sample(8000, 900 + seed), problem.basis);
    err_small += (small - problem.moments).norm();
    err_large += (large - problem.moments).norm();
  }
  double ratio = err_large / err_small;
  CHECK(ratio > 0.25);
  CHECK(ratio < 0.75);
}

TEST_CASE("ridge moments: identity projection equals tensor moments") {
  auto lambda = MultiIndexSet::total_degree_set(2, 4);
  std::vector<TensorFactor> base{{Family::uniform, 0.0, 1.0},
                                 {Family::uniform, 0.0, 1.0}};
  VectorXd m = ridge_moments(MatrixXd::Identity(2, 2), base, lambda);

  Measure mu = uniform_measure(Box::centered_cube(2));
  TensorBasis mono(lambda, {Basis1d::monomial(), Basis1d::monomial()});
  VectorXd ref = tensor_moments(mu, mono);
  CHECK((m - ref).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(m[0] == doctest::Approx(1.0));
}

TEST_CASE("ridge moments: closed form for the x1 x2 moment") {
  RandomStream rng(64);
  const int d = 7;
  MatrixXd a(2, d);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < d; ++k) a(i, k) = rng.normal();
  std::vector<TensorFactor> base(d, TensorFactor{Family::uniform, 0.0, 1.0});

  auto lambda = MultiIndexSet::total_degree_set(2, 2);
  VectorXd m = ridge_moments(a, base, lambda);

  // E[x1 x2] = sum_k A_1k A_2k E[y_k^2] = (1/3) sum_k A_1k A_2k
  int pos = -1;
  for (int n = 0; n < lambda.size(); ++n)
    if (lambda[n] == MultiIndex{1, 1}) pos = n;
  REQUIRE(pos >= 0);
  CHECK(m[pos] == doctest::Approx(a.row(0).dot(a.row(1)) / 3.0).epsilon(1e-13));
}

TEST_CASE("ridge moments agree with monte carlo") {
  RandomStream rng(11);
  MatrixXd g(20, 2);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd a = (qr.householderQ() * MatrixXd::Identity(20, 2)).transpose();

  std::vector<TensorFactor> base(20, TensorFactor{Family::uniform, 0.0, 1.0});
  auto lambda = MultiIndexSet::total_degree_set(2, 4);
  VectorXd m = ridge_moments(a, base, lambda);

  const int p = 200000;
  Domain dom = zonotope_build(a, 0, 5);
  Measure mu = Measure::ridge(20, a, dom, true);
  MatrixXd x = mu.sample(p, 31);
  TensorBasis mono(lambda, {Basis1d::monomial(), Basis1d::monomial()});
  VectorXd est = sample_moments(x, mono);
  MatrixXd v = mono.eval(x);
  for (int n = 0; n < lambda.size(); ++n) {
    double var = (v.col(n).array() - est[n]).square().mean();
    double stderrn = std::sqrt(var / p);
    CHECK(std::abs(m[n] - est[n]) < std::max(4.0 * stderrn, 1e-12));
  }
}

TEST_CASE("ridge moment degree guard") {
  std::vector<TensorFactor> base(3, TensorFactor{Family::uniform, 0.0, 1.0});
  auto lambda = MultiIndexSet::total_degree_set(1, 21);
  CHECK_THROWS_AS(ridge_moments(MatrixXd::Ones(1, 3), base, lambda),
                  std::invalid_argument);
}

TEST_CASE("gram conditioning") {
  auto lambda = MultiIndexSet::total_degree_set(2, 2);

  // tensor measure: self-orthonormal basis, no mixing
  Measure tensor_mu = uniform_measure(Box::centered_cube(2));
  auto tb = gram_conditioning_basis(tensor_mu, lambda, 7);
  CHECK_FALSE(tb.mix().has_value());

  // banana: conditioned Gram close to the identity on fresh samples
  Measure banana = banana_measure();
  auto cb = gram_conditioning_basis(banana, lambda, 7);
  CHECK(cb.mix().has_value());
  RandomStream rng(4242);
  MatrixXd fresh = banana.sample(60000, rng);
  MatrixXd v = cb.eval(fresh);
  MatrixXd gram = (v.transpose() * v) / fresh.rows();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
  CHECK(eig.eigenvalues().minCoeff() > 1.0 - 0.05);
  CHECK(eig.eigenvalues().maxCoeff() < 1.0 + 0.05);

  // rank-deficient empirical cloud triggers the fallback
  MatrixXd cloud = MatrixXd::Random(3, 2);
  Measure emp = Measure::empirical(cloud);
  auto fb = gram_conditioning_basis(emp, lambda, 7);
  CHECK_FALSE(fb.mix().has_value());
}

TEST_CASE("density moments cross-check against sampling") {
  Measure banana = banana_measure();
  auto lambda = MultiIndexSet::total_degree_set(2, 3);
  auto problem = make_density_problem(banana, lambda, 3, false);

  MatrixXd samples = banana.sample(400000, 99);
  VectorXd mc = sample_moments(samples, problem.basis);
  CHECK((mc - problem.moments).cwiseAbs().maxCoeff() < 0.02);

  // conditioned problem carries the same information, different basis
  auto conditioned = make_density_problem(banana, lambda, 3, true);
  CHECK(conditioned.moments.size() == lambda.size());
  CHECK(conditioned.basis.mix().has_value());
}

TEST_SUITE_END();
