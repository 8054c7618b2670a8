#ifndef QUADGEN_BASELINES_HPP
#define QUADGEN_BASELINES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "quadgen/domains.hpp"

namespace quadgen {

enum class BaselineKind { mc, sobol, sparse_grid, stroud2, stroud3 };

/// Comparison integrators; weights always sum to 1, sparse-grid weights may
/// be negative.
struct BaselineRule {
  BaselineKind kind = BaselineKind::mc;
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;
  int parameter = 0;  // sample count or level

  int size() const { return static_cast<int>(weights.size()); }

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i)
      acc += weights[i] * f(Eigen::VectorXd(nodes.row(i)));
    return acc;
  }
};

/// Equal-weight i.i.d. samples from mu.
BaselineRule monte_carlo_rule(const Measure& mu, int n, std::uint64_t seed);

/// Unscrambled Sobol points on [0,1]^d from Joe-Kuo direction numbers,
/// indices skip .. skip+n-1 in Gray-code order.  The direction table comes
/// from `direction_file` if nonempty, else the QUADGEN_SOBOL_FILE
/// environment variable, else a built-in table covering 64 dimensions.
/// Throws if the table has fewer than `dim` dimensions.
Eigen::MatrixXd sobol_points(int dim, int n, int skip,
                             const std::string& direction_file = "");

/// Sobol rule with equal weights, optionally mapped onto [-1,1]^d.
BaselineRule sobol_rule(int dim, int n, int skip, bool centered_cube,
                        const std::string& direction_file = "");

/// Smolyak sparse grid from nested Clenshaw-Curtis rules (1, 3, 5, 9, ...
/// points per level) for the uniform probability measure on [-1,1]^d.
BaselineRule sparse_grid(int dim, int level);

/// Monomial exponent set integrated exactly by sparse_grid(dim, level).
MultiIndexSet sparse_grid_exact_set(int dim, int level);

/// Stroud equal-weight cubature of degree 2 (d+1 points) or 3 (2d points)
/// for the uniform probability measure on [-1,1]^d.
BaselineRule stroud(int dim, int degree);

}  // namespace quadgen

#endif
