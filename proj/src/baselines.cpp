#include "quadgen/baselines.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "quadgen/orthopoly.hpp"

namespace quadgen {

// built-in Joe-Kuo direction numbers, dimensions 2..64 (sobol_table.cpp)
extern const char* const kSobolDirectionTable;

BaselineRule monte_carlo_rule(const Measure& mu, int n, std::uint64_t seed) {
  BaselineRule rule;
  rule.kind = BaselineKind::mc;
  rule.parameter = n;
  rule.nodes = mu.sample(n, seed);
  rule.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  return rule;
}

namespace {

constexpr int kSobolBits = 31;

struct SobolDimension {
  int degree = 0;
  int a = 0;
  std::vector<std::uint32_t> m;
};

std::vector<SobolDimension> parse_direction_table(std::istream& in, int dims_needed) {
  std::vector<SobolDimension> table;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line) && static_cast<int>(table.size()) + 1 < dims_needed) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int d = 0;
    SobolDimension dim;
    row >> d >> dim.degree >> dim.a;
    dim.m.resize(dim.degree);
    for (int i = 0; i < dim.degree; ++i) row >> dim.m[i];
    if (!row) throw std::runtime_error("sobol_points: malformed direction-number row");
    if (d != static_cast<int>(table.size()) + 2)
      throw std::runtime_error("sobol_points: non-contiguous direction-number rows");
    table.push_back(std::move(dim));
  }
  return table;
}

std::vector<SobolDimension> load_direction_table(int dims_needed,
                                                 const std::string& path) {
  std::string file = path;
  if (file.empty()) {
    const char* env = std::getenv("QUADGEN_SOBOL_FILE");
    if (env && *env) file = env;
  }
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("sobol_points: cannot open direction file " + file);
    return parse_direction_table(in, dims_needed);
  }
  std::istringstream in(kSobolDirectionTable);
  return parse_direction_table(in, dims_needed);
}

}  // namespace

Eigen::MatrixXd sobol_points(int dim, int n, int skip,
                             const std::string& direction_file) {
  if (dim < 1 || n < 0 || skip < 0)
    throw std::invalid_argument("sobol_points: bad arguments");
  if (static_cast<long long>(skip) + n >= (1ll << kSobolBits))
    throw std::invalid_argument("sobol_points: index range exceeds 2^31 points");
  auto table = load_direction_table(dim, direction_file);
  if (static_cast<int>(table.size()) + 1 < dim)
    throw std::runtime_error("sobol_points: direction table too short for dimension " +
                             std::to_string(dim));

  // direction integers v[j][k] = m_k * 2^(kSobolBits - k); dimension 0 is
  // the van der Corput sequence (all m_k = 1)
  std::vector<std::vector<std::uint32_t>> v(dim,
                                            std::vector<std::uint32_t>(kSobolBits + 1));
  for (int k = 1; k <= kSobolBits; ++k) v[0][k] = 1u << (kSobolBits - k);
  for (int j = 1; j < dim; ++j) {
    const SobolDimension& row = table[j - 1];
    const int s = row.degree;
    for (int k = 1; k <= std::min(s, kSobolBits); ++k)
      v[j][k] = row.m[k - 1] << (kSobolBits - k);
    for (int k = s + 1; k <= kSobolBits; ++k) {
      v[j][k] = v[j][k - s] ^ (v[j][k - s] >> s);
      for (int i = 1; i < s; ++i)
        v[j][k] ^= ((static_cast<std::uint32_t>(row.a) >> (s - 1 - i)) & 1u) * v[j][k - i];
    }
  }

  // state at index `skip` directly from the Gray code of the index
  std::vector<std::uint32_t> state(dim, 0);
  std::uint32_t gray = static_cast<std::uint32_t>(skip) ^
                       (static_cast<std::uint32_t>(skip) >> 1);
  for (int b = 0; b < kSobolBits; ++b)
    if (gray & (1u << b))
      for (int j = 0; j < dim; ++j) state[j] ^= v[j][b + 1];

  Eigen::MatrixXd out(n, dim);
  const double scale = 1.0 / std::pow(2.0, kSobolBits);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) out(i, j) = state[j] * scale;
    // advance: flip the direction of the lowest zero bit of (skip + i)
    std::uint32_t idx = static_cast<std::uint32_t>(skip) + static_cast<std::uint32_t>(i);
    int c = 0;
    while (idx & 1u) {
      idx >>= 1;
      ++c;
    }
    for (int j = 0; j < dim; ++j) state[j] ^= v[j][c + 1];
  }
  return out;
}

BaselineRule sobol_rule(int dim, int n, int skip, bool centered_cube,
                        const std::string& direction_file) {
  BaselineRule rule;
  rule.kind = BaselineKind::sobol;
  rule.parameter = n;
  rule.nodes = sobol_points(dim, n, skip, direction_file);
  if (centered_cube) rule.nodes = (2.0 * rule.nodes.array() - 1.0).matrix();
  rule.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  return rule;
}

namespace {

int cc_size(int level) { return level == 0 ? 1 : (1 << level) + 1; }

// Clenshaw-Curtis points and probability weights on [-1,1].  The sine form
// keeps nested points bit-identical across levels and the grid exactly
// symmetric.
UnivariateRule clenshaw_curtis(int level) {
  const int n = cc_size(level);
  UnivariateRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }
  const int intervals = n - 1;
  for (int j = 0; j < n; ++j)
    rule.nodes[j] = std::sin(M_PI * (2.0 * j - intervals) / (2.0 * intervals));

  // interpolatory weights through the Chebyshev basis: solve V^T w = mom
  // with V_{jk} = T_k(x_j) and mom_k = 1/(1-k^2) for even k
  Eigen::MatrixXd vand(n, n);
  for (int j = 0; j < n; ++j) {
    double prev = 1.0, cur = rule.nodes[j];
    vand(j, 0) = 1.0;
    if (n > 1) vand(j, 1) = cur;
    for (int k = 2; k < n; ++k) {
      double next = 2.0 * rule.nodes[j] * cur - prev;
      prev = cur;
      cur = next;
      vand(j, k) = next;
    }
  }
  Eigen::VectorXd mom(n);
  for (int k = 0; k < n; ++k) mom[k] = k % 2 ? 0.0 : 1.0 / (1.0 - k * k);
  rule.weights = vand.transpose().fullPivLu().solve(mom);
  return rule;
}

double binom_d(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

BaselineRule sparse_grid(int dim, int level) {
  if (dim < 1 || level < 0) throw std::invalid_argument("sparse_grid: bad arguments");
  std::vector<UnivariateRule> rules_1d(level + 1);
  for (int l = 0; l <= level; ++l) rules_1d[l] = clenshaw_curtis(l);

  // combination formula: sum over |i| in [max(0, level-dim+1), level] of
  // (-1)^(level-|i|) C(dim-1, level-|i|) (U_{i_1} x ... x U_{i_dim})
  std::map<std::vector<double>, double> accum;
  std::vector<int> idx(dim, 0);
  std::function<void(int, int)> visit = [&](int coord, int remaining) {
    if (coord == dim - 1) {
      for (int last = 0; last <= remaining; ++last) {
        idx[coord] = last;
        int total = level - (remaining - last);
        if (total < std::max(0, level - dim + 1)) continue;
        double coeff = ((level - total) % 2 ? -1.0 : 1.0) *
                       binom_d(dim - 1, level - total);
        if (coeff == 0.0) continue;
        // tensor product of the selected univariate levels
        std::vector<int> pt(dim, 0);
        while (true) {
          std::vector<double> key(dim);
          double w = coeff;
          for (int j = 0; j < dim; ++j) {
            key[j] = rules_1d[idx[j]].nodes[pt[j]];
            w *= rules_1d[idx[j]].weights[pt[j]];
          }
          accum[key] += w;
          int j = dim - 1;
          while (j >= 0 && ++pt[j] == rules_1d[idx[j]].size()) pt[j--] = 0;
          if (j < 0) break;
        }
      }
      return;
    }
    for (int l = 0; l <= remaining; ++l) {
      idx[coord] = l;
      visit(coord + 1, remaining - l);
    }
  };
  visit(0, level);

  BaselineRule rule;
  rule.kind = BaselineKind::sparse_grid;
  rule.parameter = level;
  rule.nodes.resize(accum.size(), dim);
  rule.weights.resize(accum.size());
  int row = 0;
  for (const auto& [key, w] : accum) {
    for (int j = 0; j < dim; ++j) rule.nodes(row, j) = key[j];
    rule.weights[row] = w;
    ++row;
  }
  return rule;
}

MultiIndexSet sparse_grid_exact_set(int dim, int level) {
  // exactness degree of the univariate level-k rule
  auto exact_deg = [](int k) { return k == 0 ? 1 : (1 << k) + 1; };
  std::set<MultiIndex> acc;
  std::vector<int> levels(dim, 0);
  std::function<void(int, int)> visit = [&](int coord, int remaining) {
    if (coord == dim) {
      MultiIndex alpha(dim, 0);
      std::function<void(int)> fill = [&](int j) {
        if (j == dim) {
          acc.insert(alpha);
          return;
        }
        for (int a = 0; a <= exact_deg(levels[j]); ++a) {
          alpha[j] = a;
          fill(j + 1);
        }
        alpha[j] = 0;
      };
      fill(0);
      return;
    }
    for (int l = 0; l <= remaining; ++l) {
      levels[coord] = l;
      visit(coord + 1, remaining - l);
    }
  };
  visit(0, level);
  return MultiIndexSet(dim, {acc.begin(), acc.end()});
}

BaselineRule stroud(int dim, int degree) {
  if (degree != 2 && degree != 3)
    throw std::invalid_argument("stroud: only degrees 2 and 3 are supported");
  BaselineRule rule;
  rule.kind = degree == 2 ? BaselineKind::stroud2 : BaselineKind::stroud3;
  rule.parameter = degree;
  const double radius = std::sqrt(2.0 / 3.0);

  if (degree == 2) {
    // d+1 equally weighted points on trigonometric circles
    const int n = dim + 1;
    rule.nodes.resize(n, dim);
    rule.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int k = 1; k <= n; ++k) {
      for (int r = 1; r <= dim / 2; ++r) {
        double angle = 2.0 * M_PI * r * k / n;
        rule.nodes(k - 1, 2 * r - 2) = radius * std::cos(angle);
        rule.nodes(k - 1, 2 * r - 1) = radius * std::sin(angle);
      }
      if (dim % 2)
        rule.nodes(k - 1, dim - 1) = (k % 2 ? -1.0 : 1.0) / std::sqrt(3.0);
    }
  } else {
    // 2d antipodal points, degree 3 by symmetry
    const int n = 2 * dim;
    rule.nodes.resize(n, dim);
    rule.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int k = 1; k <= n; ++k) {
      for (int r = 1; r <= dim / 2; ++r) {
        double angle = (2.0 * r - 1.0) * M_PI * k / dim;
        rule.nodes(k - 1, 2 * r - 2) = radius * std::cos(angle);
        rule.nodes(k - 1, 2 * r - 1) = radius * std::sin(angle);
      }
      if (dim % 2)
        rule.nodes(k - 1, dim - 1) = (k % 2 ? -1.0 : 1.0) / std::sqrt(3.0);
    }
  }
  return rule;
}

}  // namespace quadgen
