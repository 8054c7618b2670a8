#ifndef QUADGEN_L1INIT_HPP
#define QUADGEN_L1INIT_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "quadgen/domains.hpp"
#include "quadgen/orthopoly.hpp"

namespace quadgen {

/// Large uniform point cloud over the integration domain from which the
/// l1 stage selects its support.
struct CandidateMesh {
  Eigen::MatrixXd points;  // S x d
  std::uint64_t seed = 0;
};

/// S uniform samples over the domain (rejection from the bounding box for
/// zonotopes); deterministic per seed.  Throws for unbounded domains or if
/// zonotope rejection degenerates.
CandidateMesh candidate_mesh(const Domain& domain, int size, std::uint64_t seed);

struct SparseSolution {
  std::vector<int> support;    // mesh indices, ascending
  Eigen::VectorXd weights;     // positive, aligned with support
  double residual_linf = 0.0;  // max moment violation
  double residual_l2 = 0.0;
  int iterations = 0;
  bool stalled = false;        // homotopy ended above the target residual
};

/// Nonnegative least-angle-regression LASSO homotopy for
///   min sum w_k  s.t.  |Phi w - m|_inf <= eps,  w >= 0.
/// Adds and removes positive weights until the residual target is met or
/// the path reaches its end (the nonnegative least-squares optimum), in
/// which case the best iterate is returned with `stalled` set.
SparseSolution nn_lasso(const Eigen::MatrixXd& phi, const Eigen::VectorXd& m,
                        double eps, int max_iter = 0);

/// Matrix-free variant: column k of Phi is the basis evaluated at mesh row k.
SparseSolution nn_lasso(const TensorBasis& basis, const Eigen::MatrixXd& mesh,
                        const Eigen::VectorXd& m, double eps, int max_iter = 0);

}  // namespace quadgen

#endif
