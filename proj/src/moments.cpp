#include "quadgen/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace quadgen {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// E[(shift + scale u)^p] for the canonical family variable u
double factor_moment(const TensorFactor& f, int p) {
  double m = 0.0;
  for (int i = 0; i <= p; ++i)
    m += binom(p, i) * std::pow(f.shift, p - i) * std::pow(f.scale, i) *
         family_moment(f.family, i);
  return m;
}

Eigen::VectorXd apply_mix(const TensorBasis& basis, Eigen::VectorXd m) {
  if (basis.mix()) m = (*basis.mix()) * m;
  return m;
}

}  // namespace

Eigen::VectorXd tensor_moments(const Measure& mu, const TensorBasis& basis) {
  if (mu.kind() != Measure::Kind::tensor)
    throw std::invalid_argument("tensor_moments: tensor measure required");
  const auto& factors = mu.factors();
  const int d = basis.dim();
  if (static_cast<int>(factors.size()) != d)
    throw std::invalid_argument("tensor_moments: dimension mismatch");

  std::vector<std::vector<double>> table(d);
  for (int j = 0; j < d; ++j) {
    const int deg = basis.lambda().max_degree_in_coordinate(j);
    const int m = deg + 1;
    auto rule = gauss_rule(factors[j].recurrence(m + 1), m);
    table[j].assign(deg + 1, 0.0);
    std::vector<double> vals(deg + 1);
    for (int i = 0; i < m; ++i) {
      basis.factors()[j].values(deg, rule.nodes[i], vals.data());
      for (int k = 0; k <= deg; ++k) table[j][k] += rule.weights[i] * vals[k];
    }
  }

  Eigen::VectorXd moments(basis.size());
  const auto& idx = basis.lambda().indices();
  for (int n = 0; n < basis.size(); ++n) {
    double prod = 1.0;
    for (int j = 0; j < d; ++j) prod *= table[j][idx[n][j]];
    moments[n] = prod;
  }
  return apply_mix(basis, std::move(moments));
}

Eigen::VectorXd sample_moments(const Eigen::MatrixXd& samples, const TensorBasis& basis) {
  if (samples.rows() < 1) throw std::invalid_argument("sample_moments: need P >= 1");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(basis.size());
  std::vector<double> row(basis.size());
  Eigen::VectorXd x(basis.dim());
  for (int i = 0; i < samples.rows(); ++i) {
    x = samples.row(i);
    basis.eval_point(x, row.data());
    for (int n = 0; n < basis.size(); ++n) acc[n] += row[n];
  }
  return acc / static_cast<double>(samples.rows());
}

Eigen::VectorXd density_moments(const Measure& mu, const TensorBasis& basis) {
  if (mu.kind() != Measure::Kind::density)
    throw std::invalid_argument("density_moments: density measure required");
  const Box& box = mu.domain().box();
  const int d = box.dim();
  if (d > 3) throw std::invalid_argument("density_moments: only d <= 3 supported");
  const int q = d <= 2 ? 200 : 60;
  auto rule = gauss_rule(Recurrence::legendre(q), q);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(basis.size());
  std::vector<double> row(basis.size());
  Eigen::VectorXd x(d);
  std::vector<int> idx(d, 0);
  const double c = mu.normalization();
  while (true) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      double half = 0.5 * (box.upper[j] - box.lower[j]);
      x[j] = box.lower[j] + half * (rule.nodes[idx[j]] + 1.0);
      w *= rule.weights[idx[j]] * 2.0 * half;
    }
    w *= c * mu.density_at(x);
    basis.eval_point(x, row.data());
    for (int n = 0; n < basis.size(); ++n) acc[n] += w * row[n];
    int j = d - 1;
    while (j >= 0 && ++idx[j] == q) idx[j--] = 0;
    if (j < 0) break;
  }
  return acc;
}

Eigen::VectorXd ridge_moments(const Eigen::MatrixXd& a,
                              const std::vector<TensorFactor>& base,
                              const MultiIndexSet& lambda) {
  const int s = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  if (lambda.dim() != s) throw std::invalid_argument("ridge_moments: lambda must be s-dimensional");
  if (static_cast<int>(base.size()) != d)
    throw std::invalid_argument("ridge_moments: base factor count must be d");
  if (lambda.max_total_degree() > 20)
    throw std::invalid_argument("ridge_moments: degree guard exceeded (|alpha| > 20)");

  Eigen::VectorXd out(lambda.size());
  for (int n = 0; n < lambda.size(); ++n) {
    const MultiIndex& alpha = lambda[n];
    // enumerate the sub-exponent lattice {beta <= alpha}
    std::vector<int> shape(s), stride(s);
    int cells = 1;
    for (int j = 0; j < s; ++j) shape[j] = alpha[j] + 1;
    for (int j = s - 1; j >= 0; --j) { stride[j] = cells; cells *= shape[j]; }
    auto index_of = [&](const std::vector<int>& beta) {
      int pos = 0;
      for (int j = 0; j < s; ++j) pos += beta[j] * stride[j];
      return pos;
    };

    // F_k(beta) = E prod_j (sum_{l<=k} a_{jl} y_l)^{beta_j}, built one base
    // coordinate at a time via the binomial theorem
    std::vector<double> prev(cells, 0.0), cur(cells, 0.0);
    prev[0] = 1.0;
    std::vector<int> beta(s, 0), t(s, 0);
    for (int k = 0; k < d; ++k) {
      std::fill(cur.begin(), cur.end(), 0.0);
      std::fill(beta.begin(), beta.end(), 0);
      while (true) {
        // contribution of y_k taking exponent t <= beta
        std::fill(t.begin(), t.end(), 0);
        double value = 0.0;
        while (true) {
          double coeff = 1.0;
          int tsum = 0;
          for (int j = 0; j < s; ++j) {
            coeff *= binom(beta[j], t[j]) * std::pow(a(j, k), t[j]);
            tsum += t[j];
          }
          if (coeff != 0.0) {
            std::vector<int> rem(s);
            for (int j = 0; j < s; ++j) rem[j] = beta[j] - t[j];
            value += coeff * factor_moment(base[k], tsum) * prev[index_of(rem)];
          }
          int j = s - 1;
          while (j >= 0 && ++t[j] > beta[j]) t[j--] = 0;
          if (j < 0) break;
        }
        cur[index_of(beta)] = value;
        int j = s - 1;
        while (j >= 0 && ++beta[j] >= shape[j]) beta[j--] = 0;
        if (j < 0) break;
      }
      prev.swap(cur);
    }
    out[n] = prev[cells - 1];  // beta = alpha
  }
  return out;
}

namespace {

std::vector<Basis1d> bounding_box_legendre(const Box& box, const MultiIndexSet& lambda) {
  std::vector<Basis1d> factors;
  factors.reserve(box.dim());
  for (int j = 0; j < box.dim(); ++j) {
    double shift = 0.5 * (box.lower[j] + box.upper[j]);
    double scale = std::max(0.5 * (box.upper[j] - box.lower[j]), 1e-12);
    int n = std::max(lambda.max_degree_in_coordinate(j) + 2, 2);
    factors.push_back(
        Basis1d::orthonormal(Recurrence::legendre(n).affine_pushforward(shift, scale)));
  }
  return factors;
}

std::vector<Basis1d> self_orthonormal_factors(const Measure& mu,
                                              const MultiIndexSet& lambda) {
  std::vector<Basis1d> factors;
  factors.reserve(mu.dim());
  for (int j = 0; j < mu.dim(); ++j) {
    int n = std::max(lambda.max_degree_in_coordinate(j) + 2, 2);
    factors.push_back(Basis1d::orthonormal(mu.factors()[j].recurrence(n)));
  }
  return factors;
}

}  // namespace

TensorBasis gram_conditioning_basis(const Measure& mu, const MultiIndexSet& lambda,
                                    std::uint64_t seed, bool orthogonalize) {
  if (mu.kind() == Measure::Kind::tensor)
    return TensorBasis(lambda, self_orthonormal_factors(mu, lambda));

  TensorBasis basis(lambda, bounding_box_legendre(mu.domain().bounding_box(), lambda));
  if (!orthogonalize) return basis;

  const int n = basis.size();
  const int total = 100000;
  RandomStream rng(seed);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  int done = 0;
  while (done < total) {
    int chunk = std::min(4096, total - done);
    Eigen::MatrixXd v = basis.eval(mu.sample(chunk, rng));
    gram.selfadjointView<Eigen::Lower>().rankUpdate(v.transpose());
    done += chunk;
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  gram /= static_cast<double>(total);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success ||
      eig.eigenvalues().minCoeff() < 1e-10 * eig.eigenvalues().maxCoeff())
    return basis;  // numerically singular Gram: keep the plain box basis

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) return basis;
  Eigen::MatrixXd mix =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));  // L^{-1}
  basis.set_mix(std::move(mix));
  return basis;
}

MomentProblem make_tensor_problem(const Measure& mu, const MultiIndexSet& lambda) {
  TensorBasis basis(lambda, self_orthonormal_factors(mu, lambda));
  Eigen::VectorXd m = tensor_moments(mu, basis);
  return MomentProblem{std::move(basis), std::move(m), mu.domain(), mu.name()};
}

MomentProblem make_density_problem(const Measure& mu, const MultiIndexSet& lambda,
                                   std::uint64_t conditioning_seed,
                                   bool gram_conditioning) {
  TensorBasis basis =
      gram_conditioning_basis(mu, lambda, conditioning_seed, gram_conditioning);
  Eigen::VectorXd m = density_moments(mu, basis);
  return MomentProblem{std::move(basis), std::move(m), mu.domain(), mu.name()};
}

MomentProblem make_sample_problem(const Measure& mu, const MultiIndexSet& lambda,
                                  const Eigen::MatrixXd& samples,
                                  std::uint64_t conditioning_seed,
                                  bool gram_conditioning) {
  TensorBasis basis =
      gram_conditioning_basis(mu, lambda, conditioning_seed, gram_conditioning);
  Eigen::VectorXd m = sample_moments(samples, basis);
  return MomentProblem{std::move(basis), std::move(m), mu.domain(),
                       mu.name() + "-sampled"};
}

MomentProblem make_ridge_problem(const Measure& mu, const MultiIndexSet& lambda,
                                 std::uint64_t conditioning_seed,
                                 bool gram_conditioning) {
  if (mu.kind() != Measure::Kind::ridge)
    throw std::invalid_argument("make_ridge_problem: ridge measure required");
  if (!lambda.is_downward_closed())
    throw std::invalid_argument("make_ridge_problem: lambda must be downward closed");

  Eigen::VectorXd mono = ridge_moments(mu.ridge_matrix(), mu.factors(), lambda);

  TensorBasis basis =
      gram_conditioning_basis(mu, lambda, conditioning_seed, gram_conditioning);

  // univariate monomial coefficients of each mapped orthonormal factor
  const int s = lambda.dim();
  std::vector<std::vector<std::vector<double>>> coeff(s);
  for (int j = 0; j < s; ++j) {
    const Recurrence& rec = basis.factors()[j].recurrence();
    const int deg = lambda.max_degree_in_coordinate(j);
    coeff[j].assign(deg + 1, std::vector<double>(deg + 1, 0.0));
    coeff[j][0][0] = 1.0 / std::sqrt(rec.beta[0]);
    for (int k = 0; k < deg; ++k) {
      auto& next = coeff[j][k + 1];
      const auto& cur = coeff[j][k];
      double inv = 1.0 / std::sqrt(rec.beta[k + 1]);
      for (int i = 0; i <= k; ++i) {
        next[i + 1] += cur[i] * inv;              // t * q_k
        next[i] -= rec.alpha[k] * cur[i] * inv;   // -alpha_k q_k
        if (k > 0) next[i] -= std::sqrt(rec.beta[k]) * coeff[j][k - 1][i] * inv;
      }
    }
  }

  // m_beta = sum_{gamma <= beta} prod_j coeff[j][beta_j][gamma_j] * mono[gamma]
  Eigen::VectorXd m(lambda.size());
  const auto& idx = lambda.indices();
  for (int n = 0; n < lambda.size(); ++n) {
    const MultiIndex& beta = idx[n];
    MultiIndex gamma(s, 0);
    double acc = 0.0;
    while (true) {
      double c = 1.0;
      for (int j = 0; j < s; ++j) c *= coeff[j][beta[j]][gamma[j]];
      if (c != 0.0) {
        auto it = std::lower_bound(idx.begin(), idx.end(), gamma);
        acc += c * mono[static_cast<int>(it - idx.begin())];
      }
      int j = s - 1;
      while (j >= 0 && ++gamma[j] > beta[j]) gamma[j--] = 0;
      if (j < 0) break;
    }
    m[n] = acc;
  }
  if (basis.mix()) m = (*basis.mix()) * m;

  return MomentProblem{std::move(basis), std::move(m), mu.domain(), "ridge"};
}

}  // namespace quadgen
