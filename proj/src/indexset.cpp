#include "quadgen/indexset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace quadgen {

int total_degree(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

int support_size(const MultiIndex& alpha) {
  return static_cast<int>(std::count_if(alpha.begin(), alpha.end(),
                                        [](int a) { return a != 0; }));
}

int max_degree(const MultiIndex& alpha) {
  return alpha.empty() ? 0 : *std::max_element(alpha.begin(), alpha.end());
}

std::string to_string(const MultiIndex& alpha) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < alpha.size(); ++i)
    os << alpha[i] << (i + 1 < alpha.size() ? "," : "");
  os << ")";
  return os.str();
}

MultiIndexSet::MultiIndexSet(int dim, std::vector<MultiIndex> indices)
    : dim_(dim), indices_(std::move(indices)) {
  if (dim_ < 1) throw std::invalid_argument("MultiIndexSet: dimension must be >= 1");
  for (const auto& alpha : indices_) {
    if (static_cast<int>(alpha.size()) != dim_)
      throw std::invalid_argument("MultiIndexSet: index dimension mismatch");
    for (int a : alpha)
      if (a < 0) throw std::invalid_argument("MultiIndexSet: negative entry");
  }
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (indices_.empty())
    throw std::invalid_argument("MultiIndexSet: empty set");
}

bool MultiIndexSet::contains(const MultiIndex& alpha) const {
  return std::binary_search(indices_.begin(), indices_.end(), alpha);
}

bool MultiIndexSet::is_downward_closed() const {
  MultiIndex beta;
  for (const auto& alpha : indices_) {
    beta = alpha;
    for (int j = 0; j < dim_; ++j) {
      if (alpha[j] == 0) continue;
      beta[j] -= 1;
      if (!contains(beta)) return false;
      beta[j] += 1;
    }
  }
  return true;
}

int MultiIndexSet::max_degree_in_coordinate(int j) const {
  int m = 0;
  for (const auto& alpha : indices_) m = std::max(m, alpha[j]);
  return m;
}

int MultiIndexSet::max_total_degree() const {
  int m = 0;
  for (const auto& alpha : indices_) m = std::max(m, total_degree(alpha));
  return m;
}

namespace {

// DFS enumeration of indices with per-coordinate bound, total-degree bound,
// and support bound; emits in lexicographic order.
void enumerate_rec(int dim, int coord, int degree_left, int support_left,
                   int coord_max, double p, double p_budget, MultiIndex& cur,
                   std::vector<MultiIndex>& out) {
  if (coord == dim) {
    out.push_back(cur);
    return;
  }
  int hi = std::min(coord_max, degree_left);
  for (int v = 0; v <= hi; ++v) {
    if (v > 0 && support_left == 0) break;
    double cost = 0.0;
    if (p > 0 && v > 0) {
      cost = std::pow(static_cast<double>(v), p);
      if (cost > p_budget + 1e-9) break;
    }
    cur[coord] = v;
    enumerate_rec(dim, coord + 1, degree_left - v, support_left - (v > 0 ? 1 : 0),
                  coord_max, p, p_budget - cost, cur, out);
  }
  cur[coord] = 0;
}

}  // namespace

MultiIndexSet MultiIndexSet::total_degree_set(int dim, int degree) {
  if (dim < 1 || degree < 0) throw std::invalid_argument("total_degree_set: bad arguments");
  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 0);
  enumerate_rec(dim, 0, degree, dim, degree, 0.0, 0.0, cur, out);
  return MultiIndexSet(dim, std::move(out));
}

MultiIndexSet MultiIndexSet::ball_set(int dim, double p, double radius,
                                      std::optional<int> degree_cap) {
  if (dim < 1 || radius < 0) throw std::invalid_argument("ball_set: bad arguments");
  if (p != 0.0 && p < 1.0) throw std::invalid_argument("ball_set: p must be 0 or >= 1");

  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 0);
  const int cap = degree_cap.value_or(std::numeric_limits<int>::max() / 4);

  if (p == 0.0) {
    if (radius >= 1.0 && !degree_cap)
      throw std::invalid_argument("ball_set: B_0(r) with r >= 1 is infinite without a degree cap");
    int support = std::min(dim, static_cast<int>(std::floor(radius)));
    enumerate_rec(dim, 0, cap, support, cap, 0.0, 0.0, cur, out);
  } else if (std::isinf(p)) {
    int per_coord = static_cast<int>(std::floor(radius + 1e-12));
    enumerate_rec(dim, 0, std::min(cap, per_coord * dim), dim, per_coord, 0.0, 0.0,
                  cur, out);
  } else {
    int per_coord = static_cast<int>(std::floor(radius + 1e-12));
    double budget = std::pow(radius, p);
    enumerate_rec(dim, 0, std::min(cap, per_coord * dim), dim, per_coord, p, budget,
                  cur, out);
  }
  return MultiIndexSet(dim, std::move(out));
}

MultiIndexSet MultiIndexSet::anova_set(int dim, int order, int degree) {
  if (order > dim || order < 0) throw std::invalid_argument("anova_set: order must be in [0, dim]");
  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 0);
  enumerate_rec(dim, 0, degree, order, degree, 0.0, 0.0, cur, out);
  return MultiIndexSet(dim, std::move(out));
}

MultiIndexSet downward_closure(const MultiIndexSet& set) {
  std::set<MultiIndex> acc;
  MultiIndex beta(set.dim(), 0);
  // enumerate all beta <= alpha for each member
  for (const auto& alpha : set) {
    std::fill(beta.begin(), beta.end(), 0);
    while (true) {
      acc.insert(beta);
      int j = set.dim() - 1;
      while (j >= 0 && beta[j] == alpha[j]) beta[j--] = 0;
      if (j < 0) break;
      ++beta[j];
    }
  }
  return MultiIndexSet(set.dim(), {acc.begin(), acc.end()});
}

MultiIndexSet minkowski_sum(const MultiIndexSet& a, const MultiIndexSet& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("minkowski_sum: dimension mismatch");
  std::set<MultiIndex> acc;
  MultiIndex sum(a.dim());
  for (const auto& alpha : a)
    for (const auto& beta : b) {
      for (int j = 0; j < a.dim(); ++j) sum[j] = alpha[j] + beta[j];
      acc.insert(sum);
    }
  return MultiIndexSet(a.dim(), {acc.begin(), acc.end()});
}

namespace {

// floor(beta + p*(alpha-beta)) at rational p = num/den, exact in integers.
MultiIndex floor_blend(const MultiIndex& alpha, const MultiIndex& beta,
                       std::int64_t num, std::int64_t den) {
  MultiIndex out(alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    std::int64_t v = static_cast<std::int64_t>(beta[j]) * den +
                     num * (alpha[j] - beta[j]);
    out[j] = static_cast<int>(v / den);  // v >= 0 on p in [0,1]
  }
  return out;
}

}  // namespace

bool is_convex(const MultiIndexSet& set) {
  const auto& idx = set.indices();
  const int n = set.size();
  std::vector<std::pair<std::int64_t, std::int64_t>> grid;  // p = num/den
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      const MultiIndex& alpha = idx[i];
      const MultiIndex& beta = idx[k];
      // Breakpoints of p -> floor(beta + p(alpha-beta)): one per integer
      // crossing in each coordinate, plus midpoints of adjacent breakpoints.
      grid.clear();
      grid.emplace_back(0, 1);
      grid.emplace_back(1, 1);
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        int diff = alpha[j] - beta[j];
        if (diff == 0) continue;
        int lo = std::min(alpha[j], beta[j]), hi = std::max(alpha[j], beta[j]);
        for (int m = lo + 1; m <= hi; ++m) {
          std::int64_t num = m - beta[j], den = diff;
          if (den < 0) { num = -num; den = -den; }
          grid.emplace_back(num, den);
        }
      }
      std::sort(grid.begin(), grid.end(), [](auto a, auto b) {
        return a.first * b.second < b.first * a.second;
      });
      grid.erase(std::unique(grid.begin(), grid.end(), [](auto a, auto b) {
                   return a.first * b.second == b.first * a.second;
                 }),
                 grid.end());
      std::size_t npts = grid.size();
      for (std::size_t g = 0; g < npts; ++g) {
        if (!set.contains(floor_blend(alpha, beta, grid[g].first, grid[g].second)))
          return false;
        if (g + 1 < npts) {
          // midpoint of the open interval between adjacent breakpoints
          auto [n1, d1] = grid[g];
          auto [n2, d2] = grid[g + 1];
          if (!set.contains(floor_blend(alpha, beta, n1 * d2 + n2 * d1, 2 * d1 * d2)))
            return false;
        }
      }
    }
  }
  return true;
}

namespace {

// Max-clique search (Tomita-style greedy-coloring bound) used to find all
// maximum half-sets of a non-convex index set.
class CliqueSearch {
public:
  CliqueSearch(int n, const std::vector<std::vector<bool>>& adj)
      : n_(n), words_((n + 63) / 64), adj_(n, std::vector<std::uint64_t>(words_, 0)) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (adj[i][j]) adj_[i][j / 64] |= (std::uint64_t{1} << (j % 64));
  }

  void run() {
    std::vector<std::uint64_t> cand(words_, 0);
    for (int i = 0; i < n_; ++i) cand[i / 64] |= (std::uint64_t{1} << (i % 64));
    std::vector<int> clique;
    expand(clique, cand);
  }

  int best_size() const { return best_; }
  const std::vector<std::vector<int>>& best_cliques() const { return cliques_; }
  bool truncated() const { return truncated_; }

private:
  static constexpr int kMaxCliques = 64;
  static constexpr std::int64_t kNodeBudget = 50'000'000;

  void report(const std::vector<int>& clique) {
    int sz = static_cast<int>(clique.size());
    if (sz > best_) {
      best_ = sz;
      cliques_.clear();
    }
    if (sz == best_) {
      if (static_cast<int>(cliques_.size()) < kMaxCliques)
        cliques_.push_back(clique);
      else
        truncated_ = true;
    }
  }

  void expand(std::vector<int>& clique, std::vector<std::uint64_t> cand) {
    if (++nodes_ > kNodeBudget) { truncated_ = true; return; }

    std::vector<int> verts;
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = cand[w];
      while (bits) {
        int b = std::countr_zero(bits);
        bits &= bits - 1;
        verts.push_back(64 * w + b);
      }
    }
    if (verts.empty()) {
      report(clique);
      return;
    }

    // greedy coloring: vertices in one color class are pairwise non-adjacent,
    // so any clique uses at most one vertex per class
    std::vector<int> order;
    order.reserve(verts.size());
    std::vector<int> order_color;
    for (int c = 0; !verts.empty(); ++c) {
      std::vector<int> rest;
      std::vector<std::uint64_t> taken(words_, 0);
      for (int v : verts) {
        bool independent = true;
        for (int w = 0; w < words_; ++w)
          if (adj_[v][w] & taken[w]) { independent = false; break; }
        if (independent) {
          taken[v / 64] |= (std::uint64_t{1} << (v % 64));
          order.push_back(v);
          order_color.push_back(c + 1);
        } else {
          rest.push_back(v);
        }
      }
      verts.swap(rest);
    }

    for (int i = static_cast<int>(order.size()) - 1; i >= 0; --i) {
      int v = order[i];
      if (static_cast<int>(clique.size()) + order_color[i] < best_) return;
      std::vector<std::uint64_t> next(words_);
      for (int w = 0; w < words_; ++w) next[w] = cand[w] & adj_[v][w];
      clique.push_back(v);
      expand(clique, next);
      clique.pop_back();
      cand[v / 64] &= ~(std::uint64_t{1} << (v % 64));
    }
  }

  int n_, words_;
  std::vector<std::vector<std::uint64_t>> adj_;
  int best_ = 0;
  std::vector<std::vector<int>> cliques_;
  bool truncated_ = false;
  std::int64_t nodes_ = 0;
};

}  // namespace

HalfSetResult maximal_half_set(const MultiIndexSet& set) {
  if (!set.is_downward_closed())
    throw std::invalid_argument("maximal_half_set: set must be downward closed");

  // Candidate elements: alpha with 2*alpha in the set, i.e. floor(set/2).
  std::set<MultiIndex> cand_acc;
  for (const auto& alpha : set) {
    MultiIndex half(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j) half[j] = alpha[j] / 2;
    cand_acc.insert(half);
  }
  std::vector<MultiIndex> cand(cand_acc.begin(), cand_acc.end());
  MultiIndexSet half_floor(set.dim(), cand);

  if (is_convex(set)) {
    // Theorem: unique maximal half-set is floor(set/2).
    return {half_floor.size(), half_floor, true, {half_floor}, false};
  }

  const int n = static_cast<int>(cand.size());
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  MultiIndex sum(set.dim());
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      for (int j = 0; j < set.dim(); ++j) sum[j] = cand[i][j] + cand[k][j];
      adj[i][k] = adj[k][i] = set.contains(sum);
    }

  CliqueSearch search(n, adj);
  search.run();

  std::vector<MultiIndexSet> maximal;
  for (const auto& clique : search.best_cliques()) {
    std::vector<MultiIndex> members;
    members.reserve(clique.size());
    for (int v : clique) members.push_back(cand[v]);
    maximal.emplace_back(set.dim(), std::move(members));
  }
  std::sort(maximal.begin(), maximal.end(),
            [](const MultiIndexSet& a, const MultiIndexSet& b) {
              return a.indices() < b.indices();
            });
  maximal.erase(std::unique(maximal.begin(), maximal.end()), maximal.end());

  HalfSetResult result{search.best_size(), maximal.front(),
                       maximal.size() == 1 && !search.truncated(), maximal,
                       search.truncated()};
  return result;
}

int heuristic_size(const MultiIndexSet& set, bool floor_by_half_set) {
  int m = (set.size() + set.dim()) / (set.dim() + 1);
  if (floor_by_half_set && set.is_downward_closed())
    m = std::max(m, maximal_half_set(set).size);
  return m;
}

}  // namespace quadgen
