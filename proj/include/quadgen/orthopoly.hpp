#ifndef QUADGEN_ORTHOPOLY_HPP
#define QUADGEN_ORTHOPOLY_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "quadgen/indexset.hpp"

namespace quadgen {

/// Monic three-term recurrence coefficients of a positive measure,
/// Gautschi convention: beta[0] is the total mass (1 for probability
/// measures), beta[k] > 0 for k >= 1.  The orthonormal family follows as
///   q_0 = 1/sqrt(beta_0),
///   sqrt(beta_{k+1}) q_{k+1}(t) = (t - alpha_k) q_k(t) - sqrt(beta_k) q_{k-1}(t).
struct Recurrence {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;

  int size() const { return static_cast<int>(alpha.size()); }

  /// Uniform probability measure on [-1,1].
  static Recurrence legendre(int n);
  /// Normalized Jacobi weight ~ (1-t)^a (1+t)^b on [-1,1]; jacobi(n,1,1) is
  /// the weight (3/4)(1-t^2).
  static Recurrence jacobi(int n, double a, double b);
  /// Standard Gaussian probability measure on R.
  static Recurrence hermite(int n);
  /// Discrete Stieltjes procedure against a reference quadrature of the
  /// target measure; throws on non-positive beta (degenerate measure).
  static Recurrence stieltjes(const Eigen::VectorXd& points,
                              const Eigen::VectorXd& weights, int n);

  /// Recurrence of the pushforward measure under t -> shift + scale * t.
  Recurrence affine_pushforward(double shift, double scale) const;
};

/// Nodes in ascending order; weights strictly positive, summing to beta[0].
struct UnivariateRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// Gauss rule via eigenvalues/vectors of the Jacobi matrix; exact on
/// polynomials of degree <= 2m-1.  Requires rec.size() >= m.
UnivariateRule gauss_rule(const Recurrence& rec, int m);

/// Nodes at the roots of q_m - c q_{m-1} (eigenvalues of the rank-one
/// modified Jacobi matrix), weights from the degree-(m-1) Christoffel
/// function; exact on degree <= 2m-2.  Requires rec.size() >= m+1.
UnivariateRule radau_family_rule(const Recurrence& rec, int m, double c);

/// Orthonormal values q_0..q_deg at t; out must hold deg+1 entries.
void orthonormal_values(const Recurrence& rec, int deg, double t, double* out);
/// Values and t-derivatives via the differentiated recurrence.
void orthonormal_derivatives(const Recurrence& rec, int deg, double t,
                             double* values, double* derivatives);

/// One coordinate factor of a tensor basis: an orthonormal family given by a
/// recurrence, or plain monomials.
class Basis1d {
public:
  static Basis1d orthonormal(Recurrence rec);
  static Basis1d monomial();

  bool is_monomial() const { return monomial_; }
  const Recurrence& recurrence() const { return rec_; }

  void values(int deg, double t, double* out) const;
  void values_and_derivatives(int deg, double t, double* values,
                              double* derivatives) const;

private:
  Basis1d() = default;
  bool monomial_ = false;
  Recurrence rec_;
};

/// Tensor-product basis over an index set, with an optional linear mixing
/// matrix T applied on top (rows of T combine tensor elements; used for
/// Gram re-conditioning of non-tensor measures).
class TensorBasis {
public:
  TensorBasis(MultiIndexSet lambda, std::vector<Basis1d> factors);

  const MultiIndexSet& lambda() const { return lambda_; }
  int dim() const { return lambda_.dim(); }
  int size() const { return lambda_.size(); }
  const std::vector<Basis1d>& factors() const { return factors_; }

  void set_mix(Eigen::MatrixXd transform);
  const std::optional<Eigen::MatrixXd>& mix() const { return mix_; }

  /// S x N matrix of basis values at the given points (rows of `points`).
  Eigen::MatrixXd eval(const Eigen::MatrixXd& points) const;
  /// Entrywise partial derivative in the given coordinate.
  Eigen::MatrixXd partial(const Eigen::MatrixXd& points, int coord) const;

  /// Single-point evaluation into a caller buffer of length size().
  void eval_point(const Eigen::VectorXd& x, double* out) const;
  /// Values plus all d partial derivatives at one point; `jac` is d x N
  /// row-major on the caller side (jac[s][n] = d q_n / d x_s).
  void eval_point_with_gradient(const Eigen::VectorXd& x, double* values,
                                Eigen::MatrixXd& jac) const;

private:
  MultiIndexSet lambda_;
  std::vector<Basis1d> factors_;
  std::vector<int> coord_max_degree_;
  std::optional<Eigen::MatrixXd> mix_;
};

Eigen::MatrixXd evaluate_basis(const MultiIndexSet& lambda,
                               const std::vector<Basis1d>& factors,
                               const Eigen::MatrixXd& points);
Eigen::MatrixXd basis_partial_derivative(const MultiIndexSet& lambda,
                                         const std::vector<Basis1d>& factors,
                                         const Eigen::MatrixXd& points, int coord);

/// lambda_Theta(x) = 1 / sum_j q_j(x)^2, the reciprocal Christoffel-type
/// function; independent of the orthonormal basis chosen for P_Theta.
double christoffel_lambda(const TensorBasis& theta_basis, const Eigen::VectorXd& x);

}  // namespace quadgen

#endif
