#include "quadgen/l1init.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace quadgen {

CandidateMesh candidate_mesh(const Domain& domain, int size, std::uint64_t seed) {
  if (size < 1) throw std::invalid_argument("candidate_mesh: size must be >= 1");
  const Box& box = domain.bounding_box();
  if (!box.lower.allFinite() || !box.upper.allFinite())
    throw std::invalid_argument("candidate_mesh: domain must be bounded");

  CandidateMesh mesh;
  mesh.seed = seed;
  mesh.points.resize(size, domain.dim());
  RandomStream rng(seed);
  Eigen::VectorXd x(domain.dim());
  long proposals = 0;
  for (int i = 0; i < size; ++i) {
    while (true) {
      ++proposals;
      for (int j = 0; j < domain.dim(); ++j)
        x[j] = rng.uniform(box.lower[j], box.upper[j]);
      if (domain.contains(x)) break;
      if (proposals > 100000 && static_cast<double>(i) / proposals < 1e-4)
        throw std::runtime_error("candidate_mesh: degenerate hull, acceptance below 1e-4");
    }
    mesh.points.row(i) = x;
  }
  return mesh;
}

namespace {

// Streaming view of Phi (N x S): column k is the basis at mesh point k.
class ColumnView {
public:
  ColumnView(const Eigen::MatrixXd* phi) : phi_(phi) {}
  ColumnView(const TensorBasis* basis, const Eigen::MatrixXd* mesh)
      : basis_(basis), mesh_(mesh) {}

  int rows() const {
    return phi_ ? static_cast<int>(phi_->rows()) : basis_->size();
  }
  int cols() const {
    return phi_ ? static_cast<int>(phi_->cols()) : static_cast<int>(mesh_->rows());
  }

  void column(int k, Eigen::VectorXd& out) const {
    if (phi_) {
      out = phi_->col(k);
    } else {
      out.resize(basis_->size());
      Eigen::VectorXd x = mesh_->row(k);
      basis_->eval_point(x, out.data());
    }
  }

  // c = Phi^T r and a = Phi^T u in one pass
  void dual_products(const Eigen::VectorXd& r, const Eigen::VectorXd& u,
                     Eigen::VectorXd& c, Eigen::VectorXd& a) const {
    if (phi_) {
      c.noalias() = phi_->transpose() * r;
      a.noalias() = phi_->transpose() * u;
      return;
    }
    const int s = cols();
    c.resize(s);
    a.resize(s);
    Eigen::VectorXd col(rows());
    for (int k = 0; k < s; ++k) {
      column(k, col);
      c[k] = col.dot(r);
      a[k] = col.dot(u);
    }
  }

private:
  const Eigen::MatrixXd* phi_ = nullptr;
  const TensorBasis* basis_ = nullptr;
  const Eigen::MatrixXd* mesh_ = nullptr;
};

// Upper-triangular Cholesky factor of the active Gram matrix, grown one
// column at a time and rebuilt after removals.
class ActiveGram {
public:
  explicit ActiveGram(int n_rows) : n_(n_rows), cols_(n_rows, 0), r_(0, 0) {}

  int size() const { return static_cast<int>(r_.cols()); }
  const Eigen::MatrixXd& columns() const { return cols_; }

  // returns false if the column is numerically dependent on the active ones
  bool push(const Eigen::VectorXd& col) {
    const int a = size();
    Eigen::VectorXd u(a);
    if (a > 0)
      u = r_.topLeftCorner(a, a).transpose().triangularView<Eigen::Lower>().solve(
          cols_.leftCols(a).transpose() * col);
    double rho2 = col.squaredNorm() - u.squaredNorm();
    if (rho2 <= 1e-13 * col.squaredNorm()) return false;
    cols_.conservativeResize(Eigen::NoChange, a + 1);
    cols_.col(a) = col;
    r_.conservativeResize(a + 1, a + 1);
    if (a > 0) r_.topRightCorner(a, 1) = u;
    r_.bottomLeftCorner(1, a).setZero();
    r_(a, a) = std::sqrt(rho2);
    return true;
  }

  void remove(const std::vector<int>& positions) {
    std::vector<int> keep;
    for (int i = 0; i < size(); ++i)
      if (std::find(positions.begin(), positions.end(), i) == positions.end())
        keep.push_back(i);
    Eigen::MatrixXd next(n_, keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) next.col(i) = cols_.col(keep[i]);
    cols_ = std::move(next);
    const int a = static_cast<int>(keep.size());
    Eigen::MatrixXd gram = cols_.transpose() * cols_;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("nn_lasso: active Gram lost positive definiteness");
    r_ = llt.matrixU();
  }

  // solve G d = rhs through the factor
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    const int a = size();
    Eigen::VectorXd y =
        r_.topLeftCorner(a, a).transpose().triangularView<Eigen::Lower>().solve(rhs);
    return r_.topLeftCorner(a, a).triangularView<Eigen::Upper>().solve(y);
  }

private:
  int n_;
  Eigen::MatrixXd cols_;
  Eigen::MatrixXd r_;
};

SparseSolution nn_lasso_impl(const ColumnView& view, const Eigen::VectorXd& m,
                             double eps, int max_iter) {
  const int n = view.rows();
  const int s = view.cols();
  if (m.size() != n) throw std::invalid_argument("nn_lasso: moment size mismatch");
  if (max_iter <= 0) max_iter = 20 * n + 200;

  std::vector<int> active;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(0);
  ActiveGram gram(n);

  Eigen::VectorXd r = m;
  Eigen::VectorXd c(s), a(s), col(n);
  std::vector<char> is_active(s, 0);
  // columns found dependent on the current active span; cleared on drops
  std::vector<char> blocked(s, 0);

  SparseSolution best;
  best.residual_linf = r.cwiseAbs().maxCoeff();
  best.residual_l2 = r.norm();

  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double prev_l2 = best.residual_l2;

  auto try_add = [&](int k) {
    view.column(k, col);
    if (!gram.push(col)) {
      blocked[k] = 1;
      return false;
    }
    active.push_back(k);
    is_active[k] = 1;
    w.conservativeResize(active.size());
    w[active.size() - 1] = 0.0;
    return true;
  };

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    if (active.empty()) {
      view.dual_products(r, Eigen::VectorXd::Zero(n), c, a);
      int entering = -1;
      double cmax = 1e-12 * scale;
      for (int k = 0; k < s; ++k)
        if (!is_active[k] && !blocked[k] && c[k] > cmax) {
          cmax = c[k];
          entering = k;
        }
      if (entering < 0 || !try_add(entering))
        break;  // no admissible nonnegative direction
    }

    // equiangular direction: all active correlations decay at unit rate
    Eigen::VectorXd d = gram.solve(Eigen::VectorXd::Ones(active.size()));

    // anti-cycling (massive correlation ties are the norm here, the constant
    // basis row correlates every candidate equally): zero-weight actives
    // pushed negative leave immediately and stay blocked until the next
    // strictly positive step
    {
      std::vector<int> zero_neg;
      for (std::size_t i = 0; i < active.size(); ++i)
        if (w[i] <= 1e-14 * scale && d[i] < 0.0)
          zero_neg.push_back(static_cast<int>(i));
      if (!zero_neg.empty()) {
        gram.remove(zero_neg);
        std::vector<int> next_active;
        Eigen::VectorXd next_w(active.size() - zero_neg.size());
        int out = 0;
        for (std::size_t i = 0; i < active.size(); ++i) {
          if (std::find(zero_neg.begin(), zero_neg.end(), static_cast<int>(i)) !=
              zero_neg.end()) {
            is_active[active[i]] = 0;
            blocked[active[i]] = 1;
            continue;
          }
          next_active.push_back(active[i]);
          next_w[out++] = w[i];
        }
        active.swap(next_active);
        w = next_w;
        continue;
      }
    }

    Eigen::VectorXd u = gram.columns() * d;
    view.dual_products(r, u, c, a);
    double lambda = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i)
      lambda = std::max(lambda, c[active[i]]);
    if (lambda <= 1e-13 * scale) break;  // KKT point of nonnegative least squares

    // entering event: inactive correlation catches the active level; events
    // at gamma ~ 0 (ties) must be processed, not skipped, or the homotopy
    // overshoots and the c_k <= lambda invariant breaks
    double gamma_in = std::numeric_limits<double>::infinity();
    int entering = -1;
    for (int k = 0; k < s; ++k) {
      if (is_active[k] || blocked[k]) continue;
      double denom = 1.0 - a[k];
      if (denom <= 1e-14) continue;
      double g = (lambda - c[k]) / denom;
      if (g < -1e-9 * scale) continue;  // trails the invariant by roundoff only
      g = std::max(g, 0.0);
      if (g < gamma_in) {
        gamma_in = g;
        entering = k;
      }
    }

    // drop event (lasso modification: a weight hits zero)
    double gamma_drop = std::numeric_limits<double>::infinity();
    int drop_pos = -1;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (d[i] < 0.0 && -w[i] / d[i] < gamma_drop) {
        gamma_drop = -w[i] / d[i];
        drop_pos = static_cast<int>(i);
      }

    double gamma = std::min({gamma_in, gamma_drop, lambda});
    w += gamma * d;
    r -= gamma * u;
    if (gamma > 1e-15 * scale) std::fill(blocked.begin(), blocked.end(), 0);

    double l2 = r.norm();
    if (l2 > prev_l2 + 1e-8 * scale)
      throw std::logic_error("nn_lasso: residual increased along the homotopy path");
    prev_l2 = l2;

    double linf = r.cwiseAbs().maxCoeff();
    if (linf < best.residual_linf || best.support.empty()) {
      best.support = active;
      best.weights = w;
      best.residual_linf = linf;
      best.residual_l2 = l2;
    }
    if (linf <= eps) break;

    if (gamma_drop <= gamma_in && gamma_drop <= lambda) {
      std::vector<int> positions{drop_pos};
      for (std::size_t i = 0; i < active.size(); ++i)
        if (static_cast<int>(i) != drop_pos && d[i] < 0.0 && w[i] <= 1e-14 * scale)
          positions.push_back(static_cast<int>(i));
      gram.remove(positions);
      std::vector<int> next_active;
      Eigen::VectorXd next_w(active.size() - positions.size());
      int out = 0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (std::find(positions.begin(), positions.end(), static_cast<int>(i)) !=
            positions.end()) {
          is_active[active[i]] = 0;
          continue;
        }
        next_active.push_back(active[i]);
        next_w[out++] = std::max(w[i], 0.0);
      }
      active.swap(next_active);
      w = next_w;
    } else if (gamma_in <= lambda && entering >= 0) {
      try_add(entering);
    } else {
      // gamma == lambda: path end, KKT of nonnegative least squares
      break;
    }
  }

  SparseSolution out;
  out.iterations = iter;
  // keep the best iterate, with zero weights pruned
  for (std::size_t i = 0; i < best.support.size(); ++i) {
    if (best.weights.size() > static_cast<int>(i) && best.weights[i] > 0.0) {
      out.support.push_back(best.support[i]);
    }
  }
  out.weights.resize(out.support.size());
  int pos = 0;
  for (std::size_t i = 0; i < best.support.size(); ++i)
    if (best.weights[i] > 0.0) out.weights[pos++] = best.weights[i];

  // sort by mesh index for reproducible output
  std::vector<int> order(out.support.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return out.support[x] < out.support[y]; });
  std::vector<int> sorted_support(order.size());
  Eigen::VectorXd sorted_w(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_support[i] = out.support[order[i]];
    sorted_w[i] = out.weights[order[i]];
  }
  out.support = std::move(sorted_support);
  out.weights = std::move(sorted_w);

  out.residual_linf = best.residual_linf;
  out.residual_l2 = best.residual_l2;
  out.stalled = out.residual_linf > eps;
  return out;
}

}  // namespace

SparseSolution nn_lasso(const Eigen::MatrixXd& phi, const Eigen::VectorXd& m,
                        double eps, int max_iter) {
  return nn_lasso_impl(ColumnView(&phi), m, eps, max_iter);
}

SparseSolution nn_lasso(const TensorBasis& basis, const Eigen::MatrixXd& mesh,
                        const Eigen::VectorXd& m, double eps, int max_iter) {
  return nn_lasso_impl(ColumnView(&basis, &mesh), m, eps, max_iter);
}

}  // namespace quadgen
