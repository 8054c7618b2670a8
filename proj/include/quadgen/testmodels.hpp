#ifndef QUADGEN_TESTMODELS_HPP
#define QUADGEN_TESTMODELS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "quadgen/reduce.hpp"

namespace quadgen {

struct Integrand {
  std::function<double(const Eigen::VectorXd&)> f;
  int dim = 0;
  std::string name;
  std::optional<double> reference_mean;
  std::string reference_provenance;

  double operator()(const Eigen::VectorXd& x) const { return f(x); }
};

/// Random coefficients in [0,1], normalized so they sum to 1.
Eigen::VectorXd corner_peak_coefficients(int dim, std::uint64_t seed);

/// f(x) = (1 + sum c_i x_i)^-(d+1) on [0,1]^d, with the inclusion-exclusion
/// closed-form mean attached.
Integrand corner_peak(const Eigen::VectorXd& c);
double corner_peak_mean(const Eigen::VectorXd& c);

/// f(x) = sum_i (1 + c_i x_i + c_{i+1} x_{i+1})^-3 on [0,1]^d; the mean is a
/// sum of d-1 two-dimensional closed-form integrals.
Integrand modified_corner_peak(const Eigen::VectorXd& c);
double modified_corner_peak_mean(const Eigen::VectorXd& c);

/// Mass fraction u3 at t_end for the two-species surface absorption model,
/// integrated with an adaptive embedded Runge-Kutta 4(5) scheme
/// (rtol 1e-8, atol 1e-10).
double chemical_model(const Eigen::VectorXd& x, double t_end = 100.0,
                      double rtol = 1e-8, double atol = 1e-10);
Integrand chemical_integrand(double t_end = 100.0);

/// f(y) = g(A y) for a row-orthonormal A (s x d).
Integrand ridge_integrand(const Integrand& g, const Eigen::MatrixXd& a);

/// Rule estimate for a d-dimensional integrand using an s-dimensional rule
/// on the projected domain: sum_i w_i f(A^T x_i).
double ridge_rule_estimate(const QuadratureRule& rule, const Integrand& f,
                           const Eigen::MatrixXd& a);

/// Random matrix with orthonormal rows (s x d).
Eigen::MatrixXd random_orthonormal_rows(int s, int d, std::uint64_t seed);

}  // namespace quadgen

#endif
