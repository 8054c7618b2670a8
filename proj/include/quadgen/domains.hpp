#ifndef QUADGEN_DOMAINS_HPP
#define QUADGEN_DOMAINS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "quadgen/orthopoly.hpp"
#include "quadgen/random.hpp"

namespace quadgen {

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  double volume() const;

  static Box centered_cube(int dim, double half_width = 1.0);
};

/// Diagonal affine map x -> offset + scale .* x between boxes.
struct AffineMap {
  Eigen::VectorXd offset;
  Eigen::VectorXd scale;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& y) const;
  double jacobian() const { return scale.prod(); }
};

/// Bijection carrying `source` onto `target` componentwise; throws on
/// degenerate (zero-width) boxes.
AffineMap affine_map_box(const Box& source, const Box& target);

/// Linear projection of a hypercube: {A y | y in [-1,1]^d}, stored with an
/// outer halfspace description and the vertex subset found by probing.
struct Zonotope {
  Eigen::MatrixXd generator;   // s x d
  Eigen::MatrixXd normals;     // H x s, unit rows, closed under negation
  Eigen::VectorXd offsets;     // H, all positive (origin is the centroid)
  Eigen::MatrixXd vertices;    // V x s, closed under negation
  Box bounding;                // from the support function

  int dim() const { return static_cast<int>(generator.rows()); }
};

class Domain {
public:
  static Domain make_box(Box box);
  static Domain make_zonotope(Zonotope z);

  bool is_box() const { return zonotope_ == nullptr; }
  const Box& box() const;
  const Zonotope& zonotope() const;

  int dim() const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;
  const Box& bounding_box() const;

private:
  Box box_;
  std::shared_ptr<const Zonotope> zonotope_;
};

/// Builds the zonotope of A (s x d, full row rank) by probing random
/// directions g and collecting the maximizers A sign(A^T g); facets for
/// s = 2 come from the hull of the probed vertices, for s >= 3 from the
/// generator-subset normals.  Throws on rank deficiency.
Domain zonotope_build(const Eigen::MatrixXd& a, int n_probe, std::uint64_t seed);
inline Domain zonotope_build(const Eigen::MatrixXd& a, std::uint64_t seed) {
  return zonotope_build(a, 0, seed);  // 0 = default probe count 10 * 2^s * d
}

enum class Family { uniform, jacobi11, gaussian };

Recurrence family_recurrence(Family family, int n);
/// Monomial moments of the canonical family measure.
double family_moment(Family family, int k);

/// One coordinate of a tensor measure: a named canonical family pushed
/// forward by t = shift + scale * u.
struct TensorFactor {
  Family family = Family::uniform;
  double shift = 0.0;
  double scale = 1.0;

  Recurrence recurrence(int n) const {
    return family_recurrence(family, n).affine_pushforward(shift, scale);
  }
};

/// Integration measure: tensor product of named univariate weights, a
/// bounded density on a box, an empirical sample cloud, or the pushforward
/// of a tensor measure under a ridge projection.
class Measure {
public:
  enum class Kind { tensor, density, empirical, ridge };

  static Measure tensor(std::vector<TensorFactor> factors);
  static Measure density(std::function<double(const Eigen::VectorXd&)> unnormalized,
                         Box support, std::string name);
  static Measure empirical(Eigen::MatrixXd samples);
  static Measure ridge(int base_dim, Eigen::MatrixXd a, Domain zonotope_domain,
                       bool orthonormal_rows);

  Kind kind() const { return kind_; }
  int dim() const;
  const Domain& domain() const { return domain_; }
  const std::string& name() const { return name_; }

  const std::vector<TensorFactor>& factors() const;
  const Eigen::MatrixXd& samples() const;
  const Eigen::MatrixXd& ridge_matrix() const;
  int ridge_base_dim() const { return base_dim_; }
  double density_at(const Eigen::VectorXd& x) const;     // unnormalized
  double normalization() const { return norm_constant_; }
  double density_sup_bound() const { return sup_bound_; }

  /// n i.i.d. draws, deterministic for a given stream state; all rows lie
  /// in the domain.  Densities are drawn by rejection from the bounding box
  /// and abort with diagnostics if the acceptance rate falls below 1e-4.
  Eigen::MatrixXd sample(int n, RandomStream& rng) const;
  Eigen::MatrixXd sample(int n, std::uint64_t seed) const {
    RandomStream rng(seed);
    return sample(n, rng);
  }

private:
  Measure() = default;

  Kind kind_ = Kind::tensor;
  Domain domain_;
  std::string name_;
  std::vector<TensorFactor> factors_;                       // tensor, ridge base
  std::function<double(const Eigen::VectorXd&)> density_;   // density
  double norm_constant_ = 1.0;
  double sup_bound_ = 0.0;
  Eigen::MatrixXd samples_;                                 // empirical
  Eigen::MatrixXd ridge_a_;                                 // ridge
  int base_dim_ = 0;
};

/// The banana density C exp(-(x1^4/10 + (2 x2 - x1^2)^2 / 2)) on
/// [-3,3] x [-2,6], optionally mapped affinely onto a target box.
Measure banana_measure();
Measure banana_measure_mapped(const Box& target);

/// Uniform probability measure on a box.
Measure uniform_measure(const Box& box);

}  // namespace quadgen

#endif
