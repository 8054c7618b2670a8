#include "quadgen/domains.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"

using namespace quadgen;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

Box box2(double l0, double u0, double l1, double u1) {
  Box b;
  b.lower = vec2(l0, l1);
  b.upper = vec2(u0, u1);
  return b;
}

}  // namespace

TEST_SUITE_BEGIN("domains");

TEST_CASE("box containment") {
  Box b = Box::centered_cube(2);
  CHECK(b.contains(vec2(0, 0)));
  CHECK(b.contains(vec2(1, -1)));
  CHECK_FALSE(b.contains(vec2(1.0000001, 0)));
}

TEST_CASE("affine box maps") {
  Box canonical = box2(-3, 3, -2, 6);
  Box d1 = box2(0, 4.5, 5, 35);
  Box d2 = box2(1.28, 1.92, 16.6, 24.9);

  auto id = affine_map_box(canonical, canonical);
  CHECK((id.apply(vec2(1.5, -0.7)) - vec2(1.5, -0.7)).norm() == 0.0);

  auto m1 = affine_map_box(canonical, d1);
  CHECK((m1.apply(vec2(-3, -2)) - vec2(0, 5)).norm() < 1e-14);
  CHECK((m1.apply(vec2(3, 6)) - vec2(4.5, 35)).norm() < 1e-14);

  auto m2 = affine_map_box(canonical, d2);
  CHECK((m2.apply(vec2(3, 6)) - vec2(1.92, 24.9)).norm() < 1e-13);

  RandomStream rng(31);
  for (int i = 0; i < 50; ++i) {
    VectorXd x = vec2(rng.uniform(-3, 3), rng.uniform(-2, 6));
    CHECK((m1.invert(m1.apply(x)) - x).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((m2.invert(m2.apply(x)) - x).cwiseAbs().maxCoeff() < 1e-13);
  }

  Box degenerate = box2(0, 0, 0, 1);
  CHECK_THROWS_AS(affine_map_box(degenerate, d1), std::invalid_argument);
}

TEST_CASE("zonotope of the identity is the square") {
  MatrixXd a = MatrixXd::Identity(2, 2);
  Domain dom = zonotope_build(a, 100, 7);
  CHECK_FALSE(dom.is_box());
  const Zonotope& z = dom.zonotope();
  CHECK(z.vertices.rows() == 4);
  CHECK(z.normals.rows() == 4);
  CHECK(dom.contains(vec2(0.5, 0.5)));
  CHECK(dom.contains(vec2(1.0, 1.0), 1e-9));
  CHECK_FALSE(dom.contains(vec2(1.1, 0.0)));
  CHECK(dom.bounding_box().contains(vec2(1, 1)));

  // central symmetry of vertices and halfspaces
  for (int v = 0; v < z.vertices.rows(); ++v) {
    VectorXd neg = -z.vertices.row(v).transpose();
    bool found = false;
    for (int w = 0; w < z.vertices.rows(); ++w)
      if ((z.vertices.row(w).transpose() - neg).norm() < 1e-12) found = true;
    CHECK(found);
  }
  for (int h = 0; h < z.normals.rows(); ++h) {
    bool found = false;
    for (int g = 0; g < z.normals.rows(); ++g)
      if ((z.normals.row(g) + z.normals.row(h)).norm() < 1e-12 &&
          std::abs(z.offsets[g] - z.offsets[h]) < 1e-12)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("one-dimensional zonotope is a segment") {
  MatrixXd a(1, 4);
  a << 0.5, -1.5, 2.0, 0.25;
  Domain dom = zonotope_build(a, 20, 3);
  double r = a.cwiseAbs().sum();
  CHECK(dom.bounding_box().lower[0] == doctest::Approx(-r));
  CHECK(dom.bounding_box().upper[0] == doctest::Approx(r));
  VectorXd x(1);
  x << r - 1e-9;
  CHECK(dom.contains(x, 1e-8));
  x << r + 1e-6;
  CHECK_FALSE(dom.contains(x));
}

TEST_CASE("projected hypercube hull is self-consistent") {
  // random orthonormal rows, s = 2, d = 20
  RandomStream rng(42);
  MatrixXd g(20, 2);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(20, 2);
  MatrixXd a = q.transpose();

  Domain dom = zonotope_build(a, 0, 11);
  const Zonotope& z = dom.zonotope();
  CHECK(z.offsets.minCoeff() > 0);

  // fresh probe maximizers must lie inside the computed hull
  VectorXd dir(2);
  for (int p = 0; p < 10000; ++p) {
    dir << rng.normal(), rng.normal();
    VectorXd proj = a.transpose() * dir;
    VectorXd y(20);
    for (int k = 0; k < 20; ++k) y[k] = proj[k] >= 0 ? 1.0 : -1.0;
    CHECK(dom.contains(a * y, 1e-10));
  }

  CHECK_THROWS_AS(zonotope_build(MatrixXd::Zero(2, 4), 10, 1), std::invalid_argument);
}

TEST_CASE("three-dimensional zonotope facets") {
  RandomStream rng(8);
  MatrixXd a(3, 6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = rng.normal();
  Domain dom = zonotope_build(a, 500, 9);
  // vertices satisfy every halfspace; random cube images stay inside
  for (int p = 0; p < 2000; ++p) {
    VectorXd y(6);
    for (int k = 0; k < 6; ++k) y[k] = rng.uniform(-1.0, 1.0);
    CHECK(dom.contains(a * y, 1e-10));
  }
  // far outside point
  VectorXd x = dom.bounding_box().upper * 1.5;
  CHECK_FALSE(dom.contains(x));
}

TEST_CASE("tensor sampling statistics") {
  Measure mu = uniform_measure(Box::centered_cube(2));
  RandomStream rng(1234);
  MatrixXd s = mu.sample(1000000, rng);
  // CLT: sigma of the mean = (1/sqrt(3)) / 1000
  double bound = 4.0 / std::sqrt(3.0) / 1000.0;
  CHECK(std::abs(s.col(0).mean()) < bound);
  CHECK(std::abs(s.col(1).mean()) < bound);
  for (int i = 0; i < s.rows(); ++i) CHECK(mu.domain().contains(s.row(i).transpose()));

  // determinism per seed
  MatrixXd s1 = mu.sample(17, 99);
  MatrixXd s2 = mu.sample(17, 99);
  CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jacobi factor sampling matches its moments") {
  Measure mu = Measure::tensor({TensorFactor{Family::jacobi11, 0.0, 1.0}});
  MatrixXd s = mu.sample(200000, 5);
  double m2 = s.array().square().mean();
  // Var of t^2 under (3/4)(1-t^2) ~ 0.04/sqrt(n): generous 5 sigma
  CHECK(std::abs(m2 - 0.2) < 5.0 * 0.2 / std::sqrt(200000.0));
}

TEST_CASE("empirical measure resamples the cloud") {
  MatrixXd cloud(3, 2);
  cloud << 0, 0, 1, 2, -1, 4;
  Measure mu = Measure::empirical(cloud);
  MatrixXd s = mu.sample(500, 21);
  for (int i = 0; i < s.rows(); ++i) {
    bool matches = false;
    for (int r = 0; r < 3; ++r)
      if ((s.row(i) - cloud.row(r)).norm() == 0.0) matches = true;
    CHECK(matches);
  }
}

TEST_CASE("banana sampler agrees with dense-quadrature marginals") {
  Measure mu = banana_measure();
  RandomStream rng(777);
  MatrixXd s = mu.sample(100000, rng);

  // mass sits at x2 ~ x1^2/2 >= 0
  CHECK(s.col(1).mean() > 0.0);

  // reference marginal CDFs by tensor quadrature + trapezoid accumulation
  auto rule = gauss_rule(Recurrence::legendre(200), 200);
  Box box = mu.domain().box();
  for (int axis = 0; axis < 2; ++axis) {
    const int grid_n = 2001;
    double lo = box.lower[axis], hi = box.upper[axis];
    int other = 1 - axis;
    Eigen::VectorXd marg(grid_n);
    Eigen::VectorXd x(2);
    for (int i = 0; i < grid_n; ++i) {
      double t = lo + (hi - lo) * i / (grid_n - 1.0);
      double sum = 0.0;
      for (int k = 0; k < 200; ++k) {
        x[axis] = t;
        double half = 0.5 * (box.upper[other] - box.lower[other]);
        x[other] = box.lower[other] + half * (rule.nodes[k] + 1.0);
        sum += rule.weights[k] * 2.0 * half * mu.density_at(x);
      }
      marg[i] = sum;
    }
    Eigen::VectorXd cdf(grid_n);
    cdf[0] = 0.0;
    double h = (hi - lo) / (grid_n - 1.0);
    for (int i = 1; i < grid_n; ++i)
      cdf[i] = cdf[i - 1] + 0.5 * h * (marg[i - 1] + marg[i]);
    cdf /= cdf[grid_n - 1];

    std::vector<double> vals(s.rows());
    for (int i = 0; i < s.rows(); ++i) vals[i] = s(i, axis);
    std::sort(vals.begin(), vals.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      double pos = (vals[i] - lo) / h;
      int cell = std::clamp(static_cast<int>(pos), 0, grid_n - 2);
      double ref = cdf[cell] + (pos - cell) * (cdf[cell + 1] - cdf[cell]);
      double emp_hi = (i + 1.0) / vals.size();
      double emp_lo = i / static_cast<double>(vals.size());
      ks = std::max(ks, std::max(std::abs(emp_hi - ref), std::abs(emp_lo - ref)));
    }
    CHECK(ks < 0.01);
  }
}

TEST_SUITE_END();
