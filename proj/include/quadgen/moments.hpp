#ifndef QUADGEN_MOMENTS_HPP
#define QUADGEN_MOMENTS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "quadgen/domains.hpp"
#include "quadgen/indexset.hpp"
#include "quadgen/orthopoly.hpp"

namespace quadgen {

/// Basis description, target moment vector, and domain: the input shared by
/// the l1 stage and the local optimizer.
struct MomentProblem {
  TensorBasis basis;        // evaluation basis over lambda (mix included)
  Eigen::VectorXd moments;  // m_j = integral of basis element j
  Domain domain;
  std::string measure_name;

  const MultiIndexSet& lambda() const { return basis.lambda(); }
  int dim() const { return domain.dim(); }
};

/// m_alpha = prod_j integral of the j-th factor polynomial, each factor
/// integrated with a Gauss rule of the corresponding measure factor; exact
/// to machine precision.
Eigen::VectorXd tensor_moments(const Measure& mu, const TensorBasis& basis);

/// m_alpha = (1/P) sum_i p_alpha(x_i).
Eigen::VectorXd sample_moments(const Eigen::MatrixXd& samples, const TensorBasis& basis);

/// Moments of a bounded density by mapped 200x200 tensor Gauss-Legendre
/// against the normalized density.
Eigen::VectorXd density_moments(const Measure& mu, const TensorBasis& basis);

/// Monomial moments of x = A y under the tensor base measure of the ridge:
/// m_alpha = integral (A y)^alpha dnu(y), evaluated exactly through the
/// multinomial expansion (organized as a per-coordinate recursion).  Guards
/// against |alpha| > 20 where the expansion gets intractable.
Eigen::VectorXd ridge_moments(const Eigen::MatrixXd& a,
                              const std::vector<TensorFactor>& base,
                              const MultiIndexSet& lambda);

/// Tensor-orthonormal basis of the measure itself (tensor case) or of the
/// bounding box, optionally re-orthogonalized against 1e5 mu-samples via a
/// Cholesky factor of the sample Gram matrix.  Falls back to the plain
/// bounding-box basis if the Gram matrix is numerically singular.
TensorBasis gram_conditioning_basis(const Measure& mu, const MultiIndexSet& lambda,
                                    std::uint64_t seed, bool orthogonalize = true);

/// Problem assembly for the pipeline entry points.
MomentProblem make_tensor_problem(const Measure& mu, const MultiIndexSet& lambda);
MomentProblem make_density_problem(const Measure& mu, const MultiIndexSet& lambda,
                                   std::uint64_t conditioning_seed = 1,
                                   bool gram_conditioning = true);
/// Moments estimated from the given mu-samples (basis as in the density
/// problem, without the Gram step unless requested).
MomentProblem make_sample_problem(const Measure& mu, const MultiIndexSet& lambda,
                                  const Eigen::MatrixXd& samples,
                                  std::uint64_t conditioning_seed = 1,
                                  bool gram_conditioning = false);
/// Ridge pushforward onto a zonotope: analytic monomial moments converted
/// into the conditioned bounding-box basis.
MomentProblem make_ridge_problem(const Measure& mu, const MultiIndexSet& lambda,
                                 std::uint64_t conditioning_seed = 1,
                                 bool gram_conditioning = true);

}  // namespace quadgen

#endif
