#include "quadgen/baselines.hpp"

#include <cmath>

#include "quadgen/moments.hpp"
#include "doctest.h"

using namespace quadgen;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double tensor_uniform_monomial_moment(const MultiIndex& alpha) {
  double m = 1.0;
  for (int a : alpha) m *= a % 2 ? 0.0 : 1.0 / (a + 1);
  return m;
}

double rule_monomial_moment(const BaselineRule& rule, const MultiIndex& alpha) {
  double acc = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < alpha.size(); ++j)
      prod *= std::pow(rule.nodes(i, j), alpha[j]);
    acc += rule.weights[i] * prod;
  }
  return acc;
}

// anchored-box star discrepancy estimate using the sample corners
double star_discrepancy_estimate(const MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  double worst = 0.0;
  for (int c = 0; c < n; ++c) {
    double x = pts(c, 0), y = pts(c, 1);
    int inside_closed = 0, inside_open = 0;
    for (int i = 0; i < n; ++i) {
      if (pts(i, 0) <= x && pts(i, 1) <= y) ++inside_closed;
      if (pts(i, 0) < x && pts(i, 1) < y) ++inside_open;
    }
    worst = std::max(worst, std::abs(static_cast<double>(inside_closed) / n - x * y));
    worst = std::max(worst, std::abs(static_cast<double>(inside_open) / n - x * y));
  }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("baselines");

TEST_CASE("monte carlo estimates") {
  Measure mu = uniform_measure(Box::centered_cube(2));
  auto rule = monte_carlo_rule(mu, 1000, 4);
  CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rule.integrate([](const VectorXd&) { return 3.7; }) ==
        doctest::Approx(3.7).epsilon(1e-12));

  auto big = monte_carlo_rule(mu, 1000000, 99);
  double mean_x1 = big.integrate([](const VectorXd& x) { return x[0]; });
  CHECK(std::abs(mean_x1) < 4e-3);

  auto again = monte_carlo_rule(mu, 1000, 4);
  CHECK((rule.nodes - again.nodes).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sobol: van der corput first dimension") {
  MatrixXd pts = sobol_points(1, 4, 0);
  CHECK(pts(0, 0) == 0.0);
  CHECK(pts(1, 0) == 0.5);
  CHECK(pts(2, 0) == 0.75);
  CHECK(pts(3, 0) == 0.25);
}

TEST_CASE("sobol: first unskipped point is the midpoint") {
  MatrixXd pts = sobol_points(6, 1, 1);
  for (int j = 0; j < 6; ++j) CHECK(pts(0, j) == 0.5);
}

TEST_CASE("sobol matches reference sequence values") {
  // first eight points of the standard unscrambled 6-dimensional sequence
  const double ref[8][6] = {
      {0, 0, 0, 0, 0, 0},
      {0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
      {0.75, 0.25, 0.25, 0.25, 0.75, 0.75},
      {0.25, 0.75, 0.75, 0.75, 0.25, 0.25},
      {0.375, 0.375, 0.625, 0.875, 0.375, 0.125},
      {0.875, 0.875, 0.125, 0.375, 0.875, 0.625},
      {0.625, 0.125, 0.875, 0.625, 0.625, 0.875},
      {0.125, 0.625, 0.375, 0.125, 0.125, 0.375}};
  MatrixXd pts = sobol_points(6, 8, 0);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 6; ++j) CHECK(pts(i, j) == ref[i][j]);
}

TEST_CASE("sobol beats monte carlo discrepancy") {
  double sob = star_discrepancy_estimate(sobol_points(2, 1024, 0));
  double mc_avg = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    RandomStream rng(1000 + seed);
    MatrixXd pts(1024, 2);
    for (int i = 0; i < 1024; ++i)
      for (int j = 0; j < 2; ++j) pts(i, j) = rng.uniform01();
    mc_avg += star_discrepancy_estimate(pts);
  }
  mc_avg /= 20.0;
  CHECK(sob < mc_avg);
}

TEST_CASE("sobol dimension guard") {
  CHECK_THROWS(sobol_points(65, 4, 0));
  CHECK_THROWS(sobol_points(2, 4, 0, "/nonexistent/file.txt"));
}

TEST_CASE("sparse grid shapes") {
  auto level0 = sparse_grid(3, 0);
  CHECK(level0.size() == 1);
  CHECK(level0.nodes.cwiseAbs().maxCoeff() == 0.0);
  CHECK(level0.weights[0] == doctest::Approx(1.0));

  auto level1 = sparse_grid(2, 1);
  CHECK(level1.size() == 5);  // center plus 4 axis points
  CHECK(level1.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));

  // nestedness of the point sets
  auto level2 = sparse_grid(2, 2);
  for (int i = 0; i < level1.size(); ++i) {
    bool found = false;
    for (int k = 0; k < level2.size(); ++k)
      if ((level2.nodes.row(k) - level1.nodes.row(i)).norm() == 0.0) found = true;
    CHECK(found);
  }
}

TEST_CASE("sparse grid integrates its exactness set") {
  for (int d = 1; d <= 3; ++d)
    for (int level = 0; level <= 3; ++level) {
      auto rule = sparse_grid(d, level);
      auto exact = sparse_grid_exact_set(d, level);
      for (const auto& alpha : exact) {
        double want = tensor_uniform_monomial_moment(alpha);
        CHECK(std::abs(rule_monomial_moment(rule, alpha) - want) < 1e-12);
      }
    }
}

TEST_CASE("sparse grids have negative weights from level 2") {
  auto rule = sparse_grid(2, 2);
  CHECK(rule.weights.minCoeff() < 0.0);
  CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("stroud rules") {
  for (int d : {2, 3, 4, 5, 6, 7, 8}) {
    auto deg2 = stroud(d, 2);
    CHECK(deg2.size() == d + 1);
    CHECK(deg2.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
    for (const auto& alpha : MultiIndexSet::total_degree_set(d, 2))
      CHECK(std::abs(rule_monomial_moment(deg2, alpha) -
                     tensor_uniform_monomial_moment(alpha)) < 1e-12);

    auto deg3 = stroud(d, 3);
    CHECK(deg3.size() == 2 * d);
    for (const auto& alpha : MultiIndexSet::total_degree_set(d, 3))
      CHECK(std::abs(rule_monomial_moment(deg3, alpha) -
                     tensor_uniform_monomial_moment(alpha)) < 1e-12);

    // x1 x2 integrates to zero by the trigonometric construction
    MultiIndex cross(d, 0);
    cross[0] = cross[1] = 1;
    CHECK(std::abs(rule_monomial_moment(deg2, cross)) < 1e-12);
    CHECK(std::abs(rule_monomial_moment(deg3, cross)) < 1e-12);
  }
  CHECK_THROWS_AS(stroud(4, 5), std::invalid_argument);
}

TEST_SUITE_END();
