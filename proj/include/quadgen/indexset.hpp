#ifndef QUADGEN_INDEXSET_HPP
#define QUADGEN_INDEXSET_HPP

#include <optional>
#include <string>
#include <vector>

namespace quadgen {

/// A d-dimensional multi-index with nonnegative entries.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& alpha);
int support_size(const MultiIndex& alpha);
int max_degree(const MultiIndex& alpha);

/// Finite set of distinct multi-indices of a common dimension, kept in
/// lexicographic order so that basis/moment indexing is reproducible.
class MultiIndexSet {
public:
  MultiIndexSet(int dim, std::vector<MultiIndex> indices);

  static MultiIndexSet total_degree_set(int dim, int degree);
  static MultiIndexSet ball_set(int dim, double p, double radius,
                                std::optional<int> degree_cap = std::nullopt);
  static MultiIndexSet anova_set(int dim, int order, int degree);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& operator[](int i) const { return indices_[i]; }

  bool contains(const MultiIndex& alpha) const;
  bool is_downward_closed() const;

  /// Largest entry over all indices in coordinate j.
  int max_degree_in_coordinate(int j) const;
  int max_total_degree() const;

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool operator==(const MultiIndexSet& other) const = default;

private:
  int dim_;
  std::vector<MultiIndex> indices_;  // sorted lexicographically, no duplicates
};

MultiIndexSet downward_closure(const MultiIndexSet& set);
MultiIndexSet minkowski_sum(const MultiIndexSet& a, const MultiIndexSet& b);

/// Floor-convexity: floor(p*alpha + (1-p)*beta) stays in the set for all
/// p in [0,1] and all index pairs. Checked exactly on the rational
/// breakpoint grid where the floor changes value.
bool is_convex(const MultiIndexSet& set);

struct HalfSetResult {
  int size = 0;                          // L(set)
  MultiIndexSet theta;                   // one maximal half-set
  bool unique = true;                    // single maximal half-set?
  std::vector<MultiIndexSet> maximal;    // all maximal half-sets found (capped)
  bool enumeration_truncated = false;
};

/// Maximal half-set Theta with Theta + Theta contained in the set.
/// Closed form floor(set/2) for convex sets, exhaustive search otherwise.
/// Throws std::invalid_argument if the set is not downward closed.
HalfSetResult maximal_half_set(const MultiIndexSet& set);

/// ceil(N / (d+1)), optionally floored below by the half-set bound L.
int heuristic_size(const MultiIndexSet& set, bool floor_by_half_set = false);

std::string to_string(const MultiIndex& alpha);

}  // namespace quadgen

#endif
