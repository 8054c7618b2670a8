#ifndef QUADGEN_REDUCE_HPP
#define QUADGEN_REDUCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quadgen/l1init.hpp"
#include "quadgen/moments.hpp"

namespace quadgen {

struct RuleMetadata {
  std::string lambda_digest;
  std::string measure_digest;
  std::uint64_t seed = 0;
  int m_requested = 0;
  int increments_used = 0;
  int iterations = 0;
  int l1_support = 0;
  double l1_residual_linf = 0.0;
  bool l1_stalled = false;
  bool mesh_size_warning = false;  // S < 10 N
  bool success = false;
  double objective = 0.0;  // final least-squares objective f
};

struct QuadratureRule {
  Eigen::MatrixXd nodes;    // M x d
  Eigen::VectorXd weights;  // M, nonnegative
  double residual_l2 = 0.0;
  RuleMetadata metadata;

  int size() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(nodes.cols()); }

  /// Weighted sum of f over the nodes.
  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (int m = 0; m < size(); ++m)
      acc += weights[m] * f(Eigen::VectorXd(nodes.row(m)));
    return acc;
  }
};

enum class ExitReason { objective_stall, gradient_small, max_iter };

struct RefineReport {
  std::vector<double> trajectory;      // accepted objective values, non-increasing
  std::vector<double> gradient_norms;  // scaled gradient at accepted iterates
  ExitReason exit_reason = ExitReason::max_iter;
  bool success = false;  // final objective below 1e-8
  int iterations = 0;    // total step solves, accepted or not
  double final_objective = 0.0;
};

struct RefineOptions {
  int max_iter = 5000;
  double tau = 1e-10;        // stall/gradient tolerance
  double success_f = 1e-8;   // success threshold on the objective
};

/// Greedy pair merging: repeatedly combine the lowest-weight point with its
/// nearest neighbor into their weighted centroid until m points remain.
/// Total weight is conserved exactly.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> cluster(const Eigen::MatrixXd& points,
                                                    const Eigen::VectorXd& weights,
                                                    int m);

/// Constrained nonlinear least squares on nodes and weights: projected
/// Levenberg-Marquardt for box domains, SQP steps with the hull inequalities
/// for zonotopes.  Throws if the initial nodes violate the domain.
std::pair<QuadratureRule, RefineReport> refine(const Eigen::MatrixXd& x0,
                                               const Eigen::VectorXd& w0,
                                               const MomentProblem& problem,
                                               const RefineOptions& options = {});

/// Moment-matching objective f = sum_j (m_j - sum_m w_m p_j(x_m))^2 and its
/// analytic gradient (nodes first, node-major, then weights).
double refine_objective(const MomentProblem& problem, const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& w,
                        Eigen::VectorXd* gradient = nullptr);

struct GenerateOptions {
  std::uint64_t seed = 0;
  int mesh_size = 0;       // 0: max(10 N, 1000)
  double eps_l1 = 1e-8;
  int l1_max_iter = 0;     // 0: auto
  int max_increments = 10;
  RefineOptions refine;
  bool floor_by_half_set = true;  // start M at max(heuristic, L)
};

/// Full pipeline: candidate mesh, nonnegative l1 fit, clustering to the
/// heuristic size, local refinement; on failure the target size is
/// incremented (fresh clustering of the same stage-one rule) up to
/// max_increments.  Returns the first success, or the best failing rule
/// with metadata.success = false.
QuadratureRule generate(const MomentProblem& problem, const GenerateOptions& options = {},
                        RefineReport* final_report = nullptr,
                        SparseSolution* stage_one = nullptr);

struct VerifyReport {
  double residual_l2 = 0.0;
  double residual_linf = 0.0;
  Eigen::VectorXd per_moment;  // signed violation per basis element
};

/// Recomputes the moment mismatch of a rule from scratch in the problem
/// basis, independent of optimizer internals.
VerifyReport verify(const QuadratureRule& rule, const MomentProblem& problem);

struct QuasiOptimalityReport {
  int m = 0;
  int l = 0;
  bool is_quasi_optimal = false;  // m == l
  bool unique_half_set = true;
  /// max_j |w_j - lambda_Theta(x_j)| over every maximal half-set found;
  /// only set when m == l.
  std::optional<double> weight_check;
};

QuasiOptimalityReport quasi_optimality_report(const QuadratureRule& rule,
                                              const MultiIndexSet& lambda,
                                              const std::vector<Basis1d>& factors);

/// The diagonal Gauss construction for identical tensor factors: M =
/// floor(n/2)+1 nodes on the (sign-flipped) diagonal with the univariate
/// Gauss weights, exact for B_0(1)
/// intersect B_1(n).  Sign flips other than all +1 require a symmetric
/// factor measure.
QuadratureRule diagonal_gauss_rule(const Measure& mu, int n,
                                   const std::vector<int>& signs = {});

std::string digest_index_set(const MultiIndexSet& lambda);

}  // namespace quadgen

#endif
