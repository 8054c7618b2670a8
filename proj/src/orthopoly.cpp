#include "quadgen/orthopoly.hpp"

#include <cmath>
#include <stdexcept>

namespace quadgen {

Recurrence Recurrence::legendre(int n) { return jacobi(n, 0.0, 0.0); }

Recurrence Recurrence::jacobi(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("jacobi: n must be >= 1");
  Recurrence rec;
  rec.alpha.resize(n);
  rec.beta.resize(n);
  rec.beta[0] = 1.0;  // probability normalization
  rec.alpha[0] = (b - a) / (a + b + 2.0);
  for (int k = 1; k < n; ++k) {
    double s = 2.0 * k + a + b;
    rec.alpha[k] = (b * b - a * a) / (s * (s + 2.0));
    rec.beta[k] = 4.0 * k * (k + a) * (k + b) * (k + a + b) /
                  (s * s * (s + 1.0) * (s - 1.0));
  }
  return rec;
}

Recurrence Recurrence::hermite(int n) {
  if (n < 1) throw std::invalid_argument("hermite: n must be >= 1");
  Recurrence rec;
  rec.alpha = Eigen::VectorXd::Zero(n);
  rec.beta.resize(n);
  rec.beta[0] = 1.0;
  for (int k = 1; k < n; ++k) rec.beta[k] = static_cast<double>(k);
  return rec;
}

Recurrence Recurrence::stieltjes(const Eigen::VectorXd& points,
                                 const Eigen::VectorXd& weights, int n) {
  const int s = static_cast<int>(points.size());
  if (s < n) throw std::invalid_argument("stieltjes: reference grid too small");
  Recurrence rec;
  rec.alpha.resize(n);
  rec.beta.resize(n);

  Eigen::VectorXd p_prev = Eigen::VectorXd::Zero(s);
  Eigen::VectorXd p_cur = Eigen::VectorXd::Ones(s);
  double norm_prev = 0.0;
  double norm_cur = weights.sum();
  rec.beta[0] = norm_cur;
  if (!(norm_cur > 0)) throw std::runtime_error("stieltjes: degenerate measure");

  for (int k = 0; k < n; ++k) {
    rec.alpha[k] = (weights.array() * points.array() * p_cur.array().square()).sum() /
                   norm_cur;
    if (k > 0) rec.beta[k] = norm_cur / norm_prev;
    if (k > 0 && !(rec.beta[k] > 0))
      throw std::runtime_error("stieltjes: non-positive beta, degenerate measure");
    if (k + 1 < n) {
      Eigen::VectorXd p_next =
          (points.array() - rec.alpha[k]) * p_cur.array() -
          (k > 0 ? rec.beta[k] : 0.0) * p_prev.array();
      p_prev.swap(p_cur);
      p_cur = p_next;
      norm_prev = norm_cur;
      norm_cur = (weights.array() * p_cur.array().square()).sum();
      if (!(norm_cur > 0))
        throw std::runtime_error("stieltjes: non-positive norm, degenerate measure");
    }
  }
  return rec;
}

Recurrence Recurrence::affine_pushforward(double shift, double scale) const {
  Recurrence rec;
  rec.alpha = shift + scale * alpha.array();
  rec.beta = beta;
  for (int k = 1; k < size(); ++k) rec.beta[k] *= scale * scale;
  return rec;
}

namespace {

Eigen::MatrixXd jacobi_matrix(const Recurrence& rec, int m) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) jac(i, i) = rec.alpha[i];
  for (int i = 0; i + 1 < m; ++i) {
    double off = std::sqrt(rec.beta[i + 1]);
    jac(i, i + 1) = off;
    jac(i + 1, i) = off;
  }
  return jac;
}

}  // namespace

UnivariateRule gauss_rule(const Recurrence& rec, int m) {
  if (m < 1) throw std::invalid_argument("gauss_rule: m must be >= 1");
  if (rec.size() < m) throw std::invalid_argument("gauss_rule: recurrence too short");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi_matrix(rec, m));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_rule: eigensolver failed");
  UnivariateRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = rec.beta[0] * solver.eigenvectors().row(0).array().square();
  return rule;
}

UnivariateRule radau_family_rule(const Recurrence& rec, int m, double c) {
  if (m < 1) throw std::invalid_argument("radau_family_rule: m must be >= 1");
  if (rec.size() < m + 1)
    throw std::invalid_argument("radau_family_rule: recurrence too short");
  // roots of q_m - c q_{m-1}: modify the last diagonal entry of the Jacobi
  // matrix by c * sqrt(beta_m)
  Eigen::MatrixXd jac = jacobi_matrix(rec, m);
  jac(m - 1, m - 1) += c * std::sqrt(rec.beta[m]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("radau_family_rule: eigensolver failed");
  UnivariateRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(m);
  std::vector<double> q(m);
  for (int j = 0; j < m; ++j) {
    orthonormal_values(rec, m - 1, rule.nodes[j], q.data());
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += q[k] * q[k];
    rule.weights[j] = 1.0 / sum;
  }
  return rule;
}

void orthonormal_values(const Recurrence& rec, int deg, double t, double* out) {
  if (rec.size() < deg + 1 && deg > 0)
    throw std::invalid_argument("orthonormal_values: recurrence too short for degree");
  out[0] = 1.0 / std::sqrt(rec.beta[0]);
  if (deg == 0) return;
  out[1] = (t - rec.alpha[0]) * out[0] / std::sqrt(rec.beta[1]);
  for (int k = 1; k < deg; ++k) {
    out[k + 1] = ((t - rec.alpha[k]) * out[k] - std::sqrt(rec.beta[k]) * out[k - 1]) /
                 std::sqrt(rec.beta[k + 1]);
  }
}

void orthonormal_derivatives(const Recurrence& rec, int deg, double t,
                             double* values, double* derivatives) {
  orthonormal_values(rec, deg, t, values);
  derivatives[0] = 0.0;
  if (deg == 0) return;
  derivatives[1] = values[0] / std::sqrt(rec.beta[1]);
  for (int k = 1; k < deg; ++k) {
    derivatives[k + 1] = ((t - rec.alpha[k]) * derivatives[k] + values[k] -
                          std::sqrt(rec.beta[k]) * derivatives[k - 1]) /
                         std::sqrt(rec.beta[k + 1]);
  }
}

Basis1d Basis1d::orthonormal(Recurrence rec) {
  Basis1d b;
  b.monomial_ = false;
  b.rec_ = std::move(rec);
  return b;
}

Basis1d Basis1d::monomial() {
  Basis1d b;
  b.monomial_ = true;
  return b;
}

void Basis1d::values(int deg, double t, double* out) const {
  if (monomial_) {
    out[0] = 1.0;
    for (int k = 1; k <= deg; ++k) out[k] = out[k - 1] * t;
  } else {
    orthonormal_values(rec_, deg, t, out);
  }
}

void Basis1d::values_and_derivatives(int deg, double t, double* values,
                                     double* derivatives) const {
  if (monomial_) {
    values[0] = 1.0;
    derivatives[0] = 0.0;
    for (int k = 1; k <= deg; ++k) {
      values[k] = values[k - 1] * t;
      derivatives[k] = k * values[k - 1];
    }
  } else {
    orthonormal_derivatives(rec_, deg, t, values, derivatives);
  }
}

TensorBasis::TensorBasis(MultiIndexSet lambda, std::vector<Basis1d> factors)
    : lambda_(std::move(lambda)), factors_(std::move(factors)) {
  if (static_cast<int>(factors_.size()) != lambda_.dim())
    throw std::invalid_argument("TensorBasis: one factor per coordinate required");
  coord_max_degree_.resize(lambda_.dim());
  for (int j = 0; j < lambda_.dim(); ++j) {
    coord_max_degree_[j] = lambda_.max_degree_in_coordinate(j);
    const Basis1d& f = factors_[j];
    if (!f.is_monomial() && coord_max_degree_[j] > 0 &&
        f.recurrence().size() < coord_max_degree_[j] + 1)
      throw std::invalid_argument("TensorBasis: recurrence shorter than basis degree");
  }
}

void TensorBasis::set_mix(Eigen::MatrixXd transform) {
  if (transform.rows() != size() || transform.cols() != size())
    throw std::invalid_argument("TensorBasis::set_mix: transform must be N x N");
  mix_ = std::move(transform);
}

void TensorBasis::eval_point(const Eigen::VectorXd& x, double* out) const {
  const int d = dim();
  thread_local std::vector<std::vector<double>> table;
  table.resize(d);
  for (int j = 0; j < d; ++j) {
    table[j].resize(coord_max_degree_[j] + 1);
    factors_[j].values(coord_max_degree_[j], x[j], table[j].data());
  }
  const auto& idx = lambda_.indices();
  for (int n = 0; n < size(); ++n) {
    double prod = 1.0;
    for (int j = 0; j < d; ++j) prod *= table[j][idx[n][j]];
    out[n] = prod;
  }
  if (mix_) {
    Eigen::Map<Eigen::VectorXd> v(out, size());
    v = (*mix_) * v;
  }
}

void TensorBasis::eval_point_with_gradient(const Eigen::VectorXd& x, double* values,
                                           Eigen::MatrixXd& jac) const {
  const int d = dim();
  const int n_basis = size();
  thread_local std::vector<std::vector<double>> val_table, der_table;
  val_table.resize(d);
  der_table.resize(d);
  for (int j = 0; j < d; ++j) {
    val_table[j].resize(coord_max_degree_[j] + 1);
    der_table[j].resize(coord_max_degree_[j] + 1);
    factors_[j].values_and_derivatives(coord_max_degree_[j], x[j],
                                       val_table[j].data(), der_table[j].data());
  }
  jac.resize(d, n_basis);
  const auto& idx = lambda_.indices();
  for (int n = 0; n < n_basis; ++n) {
    const MultiIndex& alpha = idx[n];
    double prod = 1.0;
    for (int j = 0; j < d; ++j) prod *= val_table[j][alpha[j]];
    values[n] = prod;
    for (int s = 0; s < d; ++s) {
      double p = der_table[s][alpha[s]];
      if (p != 0.0)
        for (int j = 0; j < d; ++j)
          if (j != s) p *= val_table[j][alpha[j]];
      jac(s, n) = p;
    }
  }
  if (mix_) {
    Eigen::Map<Eigen::VectorXd> v(values, n_basis);
    v = (*mix_) * v;
    jac = jac * mix_->transpose();
  }
}

Eigen::MatrixXd TensorBasis::eval(const Eigen::MatrixXd& points) const {
  const int s = static_cast<int>(points.rows());
  Eigen::MatrixXd out(s, size());
  Eigen::VectorXd x(dim());
  std::vector<double> row(size());
  for (int i = 0; i < s; ++i) {
    x = points.row(i);
    eval_point(x, row.data());
    for (int n = 0; n < size(); ++n) out(i, n) = row[n];
  }
  return out;
}

Eigen::MatrixXd TensorBasis::partial(const Eigen::MatrixXd& points, int coord) const {
  if (coord < 0 || coord >= dim())
    throw std::invalid_argument("TensorBasis::partial: coordinate out of range");
  const int s = static_cast<int>(points.rows());
  Eigen::MatrixXd out(s, size());
  Eigen::VectorXd x(dim());
  std::vector<double> values(size());
  Eigen::MatrixXd jac;
  for (int i = 0; i < s; ++i) {
    x = points.row(i);
    eval_point_with_gradient(x, values.data(), jac);
    out.row(i) = jac.row(coord);
  }
  return out;
}

Eigen::MatrixXd evaluate_basis(const MultiIndexSet& lambda,
                               const std::vector<Basis1d>& factors,
                               const Eigen::MatrixXd& points) {
  return TensorBasis(lambda, factors).eval(points);
}

Eigen::MatrixXd basis_partial_derivative(const MultiIndexSet& lambda,
                                         const std::vector<Basis1d>& factors,
                                         const Eigen::MatrixXd& points, int coord) {
  return TensorBasis(lambda, factors).partial(points, coord);
}

double christoffel_lambda(const TensorBasis& theta_basis, const Eigen::VectorXd& x) {
  std::vector<double> values(theta_basis.size());
  theta_basis.eval_point(x, values.data());
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return 1.0 / sum;
}

}  // namespace quadgen
