#include "quadgen/testmodels.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>

#include "quadgen/random.hpp"

namespace quadgen {

Eigen::VectorXd corner_peak_coefficients(int dim, std::uint64_t seed) {
  RandomStream rng(seed);
  Eigen::VectorXd c(dim);
  for (int i = 0; i < dim; ++i) c[i] = rng.uniform01();
  double total = c.sum();
  if (total <= 0) c.setConstant(1.0 / dim);
  else c /= total;
  return c;
}

double corner_peak_mean(const Eigen::VectorXd& c) {
  const int d = static_cast<int>(c.size());
  if (d > 25) throw std::invalid_argument("corner_peak_mean: 2^d expansion too large");
  // iterated antiderivative: (prod c_i d!)^-1 sum_T (-1)^|T| / (1 + sum_T c)
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    double s = 0.0;
    int bits = 0;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        s += c[i];
        ++bits;
      }
    total += (bits % 2 ? -1.0 : 1.0) / (1.0 + s);
  }
  double factorial = 1.0;
  for (int i = 2; i <= d; ++i) factorial *= i;
  return total / (factorial * c.prod());
}

Integrand corner_peak(const Eigen::VectorXd& c) {
  const int d = static_cast<int>(c.size());
  for (int i = 0; i < d; ++i)
    if (!(c[i] > 0)) throw std::invalid_argument("corner_peak: coefficients must be positive");
  Integrand out;
  out.dim = d;
  out.name = "cp";
  out.f = [c, d](const Eigen::VectorXd& x) {
    return std::pow(1.0 + c.dot(x), -(d + 1));
  };
  out.reference_mean = corner_peak_mean(c);
  out.reference_provenance = "inclusion-exclusion closed form";
  return out;
}

namespace {

// integral of (1 + a x + b y)^-3 over the unit square
double pair_term_mean(double a, double b) {
  return (1.0 - 1.0 / (1.0 + a) - 1.0 / (1.0 + b) + 1.0 / (1.0 + a + b)) /
         (2.0 * a * b);
}

}  // namespace

double modified_corner_peak_mean(const Eigen::VectorXd& c) {
  double total = 0.0;
  for (int i = 0; i + 1 < c.size(); ++i) total += pair_term_mean(c[i], c[i + 1]);
  return total;
}

Integrand modified_corner_peak(const Eigen::VectorXd& c) {
  const int d = static_cast<int>(c.size());
  if (d < 2) throw std::invalid_argument("modified_corner_peak: need d >= 2");
  Integrand out;
  out.dim = d;
  out.name = "mcp";
  out.f = [c, d](const Eigen::VectorXd& x) {
    double total = 0.0;
    for (int i = 0; i + 1 < d; ++i)
      total += std::pow(1.0 + c[i] * x[i] + c[i + 1] * x[i + 1], -3.0);
    return total;
  };
  out.reference_mean = modified_corner_peak_mean(c);
  out.reference_provenance = "sum of pairwise closed-form integrals";
  return out;
}

double chemical_model(const Eigen::VectorXd& x, double t_end, double rtol,
                      double atol) {
  if (x.size() != 2) throw std::invalid_argument("chemical_model: x must be 2-dimensional");
  using state_type = std::array<double, 3>;
  const double c = 0.04, dd = 1.0, e = 0.36, f = 0.016;
  const double x1 = x[0], x2 = x[1];

  auto rhs = [&](const state_type& u, state_type& dudt, double) {
    double z = 1.0 - u[0] - u[1] - u[2];  // vacant surface fraction
    dudt[0] = x1 * z - c * u[0] - 4.0 * dd * u[0] * u[1];
    dudt[1] = 2.0 * x2 * z * z - 4.0 * dd * u[0] * u[1];
    dudt[2] = e * z - f * u[2];
  };

  state_type u{0.0, 0.0, 0.0};
  if (t_end <= 0.0) return u[2];
  using stepper = boost::numeric::odeint::runge_kutta_dopri5<state_type>;
  boost::numeric::odeint::integrate_adaptive(
      boost::numeric::odeint::make_controlled<stepper>(atol, rtol), rhs, u, 0.0,
      t_end, 1e-3);
  return u[2];
}

Integrand chemical_integrand(double t_end) {
  Integrand out;
  out.dim = 2;
  out.name = "chem";
  out.f = [t_end](const Eigen::VectorXd& x) { return chemical_model(x, t_end); };
  return out;
}

Integrand ridge_integrand(const Integrand& g, const Eigen::MatrixXd& a) {
  if (g.dim != a.rows())
    throw std::invalid_argument("ridge_integrand: projection rows must match g");
  Eigen::MatrixXd gram = a * a.transpose();
  if ((gram - Eigen::MatrixXd::Identity(a.rows(), a.rows())).cwiseAbs().maxCoeff() >
      1e-12)
    throw std::invalid_argument("ridge_integrand: rows must be orthonormal");
  Integrand out;
  out.dim = static_cast<int>(a.cols());
  out.name = g.name + "-ridge";
  Eigen::MatrixXd a_copy = a;
  auto inner = g.f;
  out.f = [inner, a_copy](const Eigen::VectorXd& y) { return inner(a_copy * y); };
  return out;
}

double ridge_rule_estimate(const QuadratureRule& rule, const Integrand& f,
                           const Eigen::MatrixXd& a) {
  if (f.dim != a.cols())
    throw std::invalid_argument("ridge_rule_estimate: integrand dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    Eigen::VectorXd y = a.transpose() * rule.nodes.row(i).transpose();
    acc += rule.weights[i] * f(y);
  }
  return acc;
}

Eigen::MatrixXd random_orthonormal_rows(int s, int d, std::uint64_t seed) {
  if (s > d) throw std::invalid_argument("random_orthonormal_rows: need s <= d");
  RandomStream rng(seed);
  Eigen::MatrixXd g(d, s);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < s; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, s);
  return q.transpose();
}

}  // namespace quadgen
