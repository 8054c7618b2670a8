#include "quadgen/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace quadgen {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace

std::string digest_index_set(const MultiIndexSet& lambda) {
  std::string s;
  for (const auto& alpha : lambda) {
    for (int a : alpha) {
      s += std::to_string(a);
      s += ',';
    }
    s += ';';
  }
  return hex64(fnv1a(s));
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> cluster(const Eigen::MatrixXd& points,
                                                    const Eigen::VectorXd& weights,
                                                    int m) {
  const int s = static_cast<int>(points.rows());
  if (m < 1 || m > s) throw std::invalid_argument("cluster: need 1 <= m <= S");
  std::vector<Eigen::VectorXd> x(s);
  std::vector<double> w(s);
  for (int i = 0; i < s; ++i) {
    x[i] = points.row(i);
    w[i] = weights[i];
  }

  while (static_cast<int>(x.size()) > m) {
    int lightest = 0;
    for (std::size_t k = 1; k < w.size(); ++k)
      if (w[k] < w[lightest]) lightest = static_cast<int>(k);
    int nearest = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (static_cast<int>(k) == lightest) continue;
      double dist = (x[k] - x[lightest]).squaredNorm();
      if (dist < best) {
        best = dist;
        nearest = static_cast<int>(k);
      }
    }
    double merged_w = w[lightest] + w[nearest];
    x[lightest] = (w[lightest] * x[lightest] + w[nearest] * x[nearest]) / merged_w;
    w[lightest] = merged_w;
    x.erase(x.begin() + nearest);
    w.erase(w.begin() + nearest);
  }

  Eigen::MatrixXd out_x(x.size(), points.cols());
  Eigen::VectorXd out_w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out_x.row(i) = x[i];
    out_w[i] = w[i];
  }
  return {out_x, out_w};
}

namespace {

// Residuals r_j = m_j - sum_m w_m p_j(x_m) with Gauss-Newton accumulation.
// Parameter layout: nodes first (node-major), then the M weights.
class ResidualModel {
public:
  ResidualModel(const MomentProblem& problem, int m_nodes)
      : problem_(problem), m_(m_nodes), d_(problem.dim()),
        n_(problem.lambda().size()) {
    if (!problem_.basis.mix()) {
      // without mixing each basis element depends only on its support
      // coordinates, which keeps the Jacobian rows sparse
      support_.resize(n_);
      for (int j = 0; j < n_; ++j)
        for (int s = 0; s < d_; ++s)
          if (problem_.lambda()[j][s] > 0) support_[j].push_back(s);
    }
  }

  int n_params() const { return m_ * (d_ + 1); }
  int n_nodes() const { return m_; }

  Eigen::VectorXd pack(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) const {
    Eigen::VectorXd theta(n_params());
    for (int i = 0; i < m_; ++i) theta.segment(i * d_, d_) = x.row(i);
    theta.tail(m_) = w;
    return theta;
  }

  void unpack(const Eigen::VectorXd& theta, Eigen::MatrixXd& x,
              Eigen::VectorXd& w) const {
    x.resize(m_, d_);
    for (int i = 0; i < m_; ++i) x.row(i) = theta.segment(i * d_, d_);
    w = theta.tail(m_);
  }

  double objective(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd r;
    residual(theta, r);
    return r.squaredNorm();
  }

  void residual(const Eigen::VectorXd& theta, Eigen::VectorXd& r) const {
    r = problem_.moments;
    std::vector<double> values(n_);
    Eigen::VectorXd x(d_);
    for (int i = 0; i < m_; ++i) {
      x = theta.segment(i * d_, d_);
      problem_.basis.eval_point(x, values.data());
      double w = theta[m_ * d_ + i];
      for (int j = 0; j < n_; ++j) r[j] -= w * values[j];
    }
  }

  // f = |r|^2 together with JtJ (lower triangle filled) and Jtr
  double assemble(const Eigen::VectorXd& theta, Eigen::VectorXd& r,
                  Eigen::MatrixXd& jtj, Eigen::VectorXd& jtr) const {
    const int p = n_params();
    values_.resize(m_, std::vector<double>(n_));
    grads_.assign(m_, Eigen::MatrixXd());
    r = problem_.moments;
    Eigen::VectorXd x(d_);
    for (int i = 0; i < m_; ++i) {
      x = theta.segment(i * d_, d_);
      problem_.basis.eval_point_with_gradient(x, values_[i].data(), grads_[i]);
      double w = theta[m_ * d_ + i];
      for (int j = 0; j < n_; ++j) r[j] -= w * values_[i][j];
    }

    jtj = Eigen::MatrixXd::Zero(p, p);
    jtr = Eigen::VectorXd::Zero(p);

    if (!support_.empty()) {
      // row-sparse accumulation: row j touches the support coordinates of
      // alpha_j at every node plus all weight columns
      std::vector<int> cols;
      std::vector<double> vals;
      for (int j = 0; j < n_; ++j) {
        cols.clear();
        vals.clear();
        for (int i = 0; i < m_; ++i) {
          double w = theta[m_ * d_ + i];
          for (int s : support_[j]) {
            cols.push_back(i * d_ + s);
            vals.push_back(-w * grads_[i](s, j));
          }
        }
        for (int i = 0; i < m_; ++i) {
          cols.push_back(m_ * d_ + i);
          vals.push_back(-values_[i][j]);
        }
        const int nnz = static_cast<int>(cols.size());
        for (int a = 0; a < nnz; ++a) {
          jtr[cols[a]] += vals[a] * r[j];
          for (int b = 0; b <= a; ++b) {
            int ca = cols[a], cb = cols[b];
            if (ca >= cb)
              jtj(ca, cb) += vals[a] * vals[b];
            else
              jtj(cb, ca) += vals[a] * vals[b];
          }
        }
      }
    } else {
      Eigen::MatrixXd jac(n_, p);
      for (int i = 0; i < m_; ++i) {
        double w = theta[m_ * d_ + i];
        for (int j = 0; j < n_; ++j) {
          for (int s = 0; s < d_; ++s) jac(j, i * d_ + s) = -w * grads_[i](s, j);
          jac(j, m_ * d_ + i) = -values_[i][j];
        }
      }
      jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
      jtr.noalias() = jac.transpose() * r;
    }
    jtj = jtj.selfadjointView<Eigen::Lower>();
    return r.squaredNorm();
  }

private:
  const MomentProblem& problem_;
  int m_, d_, n_;
  std::vector<std::vector<int>> support_;
  mutable std::vector<std::vector<double>> values_;
  mutable std::vector<Eigen::MatrixXd> grads_;
};

// Primal active-set solver for min 1/2 p^T B p + g^T p s.t. A p <= b with
// b >= 0 (p = 0 feasible).  B must be positive definite.
Eigen::VectorXd solve_qp(const Eigen::MatrixXd& b_mat, const Eigen::VectorXd& g,
                         const Eigen::MatrixXd& a_mat, const Eigen::VectorXd& b_vec) {
  const int n = static_cast<int>(g.size());
  const int m_con = static_cast<int>(b_vec.size());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  std::vector<int> working;
  for (int i = 0; i < m_con; ++i)
    if (b_vec[i] <= 1e-12) working.push_back(i);

  const int max_qp_iter = 3 * m_con + 60;
  for (int it = 0; it < max_qp_iter; ++it) {
    const int k = static_cast<int>(working.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    kkt.topLeftCorner(n, n) = b_mat;
    for (int i = 0; i < k; ++i) {
      kkt.block(n + i, 0, 1, n) = a_mat.row(working[i]);
      kkt.block(0, n + i, n, 1) = a_mat.row(working[i]).transpose();
    }
    Eigen::VectorXd rhs(n + k);
    rhs.head(n) = -g;
    for (int i = 0; i < k; ++i) rhs[n + i] = b_vec[working[i]];
    Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
    Eigen::VectorXd target = sol.head(n);
    Eigen::VectorXd step = target - p;

    if (step.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, p.cwiseAbs().maxCoeff())) {
      // KKT multipliers decide whether a working constraint can be released
      int worst = -1;
      double most_negative = -1e-10;
      for (int i = 0; i < k; ++i)
        if (-sol[n + i] < most_negative) {
          most_negative = -sol[n + i];
          worst = i;
        }
      if (worst < 0) return p;
      working.erase(working.begin() + worst);
      continue;
    }

    double t = 1.0;
    int blocker = -1;
    for (int i = 0; i < m_con; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      double rate = a_mat.row(i).dot(step);
      if (rate <= 1e-14) continue;
      double room = b_vec[i] - a_mat.row(i).dot(p);
      double ti = room / rate;
      if (ti < t) {
        t = ti;
        blocker = i;
      }
    }
    p += t * step;
    if (blocker >= 0)
      working.push_back(blocker);
    else if (t >= 1.0)
      // full step taken with no blocker: loop to the multiplier test
      continue;
  }
  return p;  // iteration guard: return the best feasible point reached
}

struct Constraints {
  // box bounds per parameter (may be +-inf), or general rows for zonotopes
  Eigen::VectorXd lower, upper;
  bool use_qp = false;
  const Zonotope* zono = nullptr;
};

Constraints make_constraints(const MomentProblem& problem, int m_nodes) {
  const int d = problem.dim();
  const int p = m_nodes * (d + 1);
  Constraints c;
  c.lower = Eigen::VectorXd::Constant(p, -std::numeric_limits<double>::infinity());
  c.upper = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity());
  for (int i = 0; i < m_nodes; ++i) c.lower[m_nodes * d + i] = 0.0;  // w >= 0
  if (problem.domain.is_box()) {
    const Box& box = problem.domain.box();
    for (int i = 0; i < m_nodes; ++i)
      for (int s = 0; s < d; ++s) {
        c.lower[i * d + s] = box.lower[s];
        c.upper[i * d + s] = box.upper[s];
      }
  } else {
    c.use_qp = true;
    c.zono = &problem.domain.zonotope();
  }
  return c;
}

}  // namespace

std::pair<QuadratureRule, RefineReport> refine(const Eigen::MatrixXd& x0,
                                               const Eigen::VectorXd& w0,
                                               const MomentProblem& problem,
                                               const RefineOptions& options) {
  const int m_nodes = static_cast<int>(x0.rows());
  const int d = problem.dim();
  if (x0.cols() != d || w0.size() != m_nodes)
    throw std::invalid_argument("refine: shape mismatch");
  for (int i = 0; i < m_nodes; ++i) {
    if (!problem.domain.contains(x0.row(i).transpose(), 1e-10))
      throw std::invalid_argument("refine: initial node outside the domain");
    if (w0[i] < -1e-12) throw std::invalid_argument("refine: negative initial weight");
  }

  ResidualModel model(problem, m_nodes);
  Constraints cons = make_constraints(problem, m_nodes);
  const int n_par = model.n_params();

  Eigen::VectorXd theta = model.pack(x0, w0.cwiseMax(0.0));
  Eigen::VectorXd r;
  Eigen::MatrixXd jtj;
  Eigen::VectorXd jtr;
  double f = model.assemble(theta, r, jtj, jtr);

  RefineReport report;
  report.trajectory.push_back(f);
  Eigen::VectorXd theta_best = theta;
  double f_best = f;

  double lm_damping = 1e-3;
  const double act_tol = 1e-10;
  int iter = 0;
  bool done = false;

  while (!done && iter < options.max_iter) {
    // scaled gradient: grad f = 2 J^T r with components blocked by an
    // active bound projected out
    Eigen::VectorXd grad = 2.0 * jtr;
    Eigen::VectorXd gs = grad;
    for (int i = 0; i < n_par; ++i) {
      if (theta[i] <= cons.lower[i] + act_tol && grad[i] > 0.0) gs[i] = 0.0;
      if (theta[i] >= cons.upper[i] - act_tol && grad[i] < 0.0) gs[i] = 0.0;
    }
    if (cons.use_qp) {
      const Zonotope& z = *cons.zono;
      for (int i = 0; i < m_nodes; ++i) {
        Eigen::VectorXd x = theta.segment(i * d, d);
        Eigen::VectorXd gx = gs.segment(i * d, d);
        for (int h = 0; h < z.normals.rows(); ++h) {
          if (z.normals.row(h).dot(x) >= z.offsets[h] - act_tol) {
            // descent -gx must stay feasible: project out the outward part
            double gn = z.normals.row(h).dot(gx);
            if (gn < 0.0) gx -= gn * z.normals.row(h).transpose();
          }
        }
        gs.segment(i * d, d) = gx;
      }
    }
    report.gradient_norms.push_back(gs.cwiseAbs().maxCoeff());

    if (f == 0.0 || gs.cwiseAbs().maxCoeff() < options.tau) {
      report.exit_reason = ExitReason::gradient_small;
      break;
    }

    Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-10);
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      ++iter;
      Eigen::MatrixXd b_mat = jtj;
      b_mat.diagonal() += lm_damping * diag;

      Eigen::VectorXd theta_trial;
      if (!cons.use_qp) {
        Eigen::VectorXd delta = Eigen::LDLT<Eigen::MatrixXd>(b_mat).solve(-jtr);
        theta_trial = (theta + delta).cwiseMax(cons.lower).cwiseMin(cons.upper);
      } else {
        // linearized feasibility: hull inequalities per node plus w >= 0
        const Zonotope& z = *cons.zono;
        const int rows_per_node = static_cast<int>(z.normals.rows());
        const int n_con = m_nodes * rows_per_node + m_nodes;
        Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(n_con, n_par);
        Eigen::VectorXd b_vec(n_con);
        for (int i = 0; i < m_nodes; ++i) {
          Eigen::VectorXd x = theta.segment(i * d, d);
          for (int h = 0; h < rows_per_node; ++h) {
            a_mat.block(i * rows_per_node + h, i * d, 1, d) = z.normals.row(h);
            b_vec[i * rows_per_node + h] =
                std::max(z.offsets[h] - z.normals.row(h).dot(x), 0.0);
          }
          a_mat(m_nodes * rows_per_node + i, m_nodes * d + i) = -1.0;
          b_vec[m_nodes * rows_per_node + i] = std::max(theta[m_nodes * d + i], 0.0);
        }
        Eigen::VectorXd delta = solve_qp(b_mat, jtr, a_mat, b_vec);
        theta_trial = theta + delta;
        theta_trial.tail(m_nodes) = theta_trial.tail(m_nodes).cwiseMax(0.0);
      }

      double f_trial = model.objective(theta_trial);
      if (f_trial <= f) {
        double f_prev = f;
        theta = theta_trial;
        f = f_trial;
        lm_damping = std::max(lm_damping / 3.0, 1e-14);
        accepted = true;
        report.trajectory.push_back(f);
        if (f < f_best) {
          f_best = f;
          theta_best = theta;
        }
        if (std::abs(f_prev - f) < options.tau * f) {
          report.exit_reason = ExitReason::objective_stall;
          done = true;
        }
      } else {
        lm_damping *= 4.0;
        if (lm_damping > 1e15) {
          report.exit_reason = ExitReason::objective_stall;
          done = true;
          break;
        }
      }
    }
    if (!accepted && !done) {
      report.exit_reason = ExitReason::objective_stall;
      break;
    }
    if (done || iter >= options.max_iter) {
      if (iter >= options.max_iter && !done) report.exit_reason = ExitReason::max_iter;
      break;
    }
    f = model.assemble(theta, r, jtj, jtr);
  }

  report.iterations = iter;
  report.final_objective = f_best;
  report.success = f_best < options.success_f;

  QuadratureRule rule;
  Eigen::VectorXd w_out;
  model.unpack(theta_best, rule.nodes, w_out);
  rule.weights = w_out.cwiseMax(0.0);
  rule.residual_l2 = std::sqrt(f_best);
  rule.metadata.iterations = iter;
  rule.metadata.success = report.success;
  rule.metadata.objective = f_best;
  for (int i = 0; i < m_nodes; ++i) {
    if (!problem.domain.contains(rule.nodes.row(i).transpose(), 1e-8))
      throw std::runtime_error("refine: node left the domain");
  }
  return {std::move(rule), std::move(report)};
}

QuadratureRule generate(const MomentProblem& problem, const GenerateOptions& options,
                        RefineReport* final_report, SparseSolution* stage_one) {
  const int n = problem.lambda().size();
  const int d = problem.dim();
  const int mesh_size = options.mesh_size > 0 ? options.mesh_size
                                              : std::max(10 * n, 1000);

  CandidateMesh mesh = candidate_mesh(problem.domain, mesh_size, options.seed);
  SparseSolution sol = nn_lasso(problem.basis, mesh.points, problem.moments,
                                options.eps_l1, options.l1_max_iter);
  if (stage_one) *stage_one = sol;

  Eigen::MatrixXd x_init;
  Eigen::VectorXd w_init;
  if (!sol.support.empty()) {
    x_init.resize(sol.support.size(), d);
    for (std::size_t i = 0; i < sol.support.size(); ++i)
      x_init.row(i) = mesh.points.row(sol.support[i]);
    w_init = sol.weights;
  } else {
    // the homotopy found nothing usable; seed from the mesh directly
    int fallback = std::min(mesh_size, std::max(2 * heuristic_size(problem.lambda()), 8));
    x_init = mesh.points.topRows(fallback);
    w_init = Eigen::VectorXd::Constant(fallback, 1.0 / fallback);
  }

  int m_start = heuristic_size(problem.lambda(), options.floor_by_half_set &&
                                                     problem.lambda().is_downward_closed());

  QuadratureRule best;
  RefineReport best_report;
  double best_f = std::numeric_limits<double>::infinity();
  int used = 0;

  for (int inc = 0; inc <= options.max_increments; ++inc) {
    int m_target = std::min(m_start + inc, static_cast<int>(x_init.rows()));
    auto [x_cl, w_cl] = cluster(x_init, w_init, m_target);
    auto [rule, report] = refine(x_cl, w_cl, problem, options.refine);
    used = inc;
    if (report.final_objective < best_f) {
      best_f = report.final_objective;
      best = rule;
      best_report = report;
    }
    if (report.success) break;
    if (m_target == static_cast<int>(x_init.rows())) break;  // cannot grow further
  }

  best.metadata.lambda_digest = digest_index_set(problem.lambda());
  best.metadata.measure_digest = hex64(fnv1a(problem.measure_name));
  best.metadata.seed = options.seed;
  best.metadata.m_requested = m_start;
  best.metadata.increments_used = used;
  best.metadata.l1_support = static_cast<int>(sol.support.size());
  best.metadata.l1_residual_linf = sol.residual_linf;
  best.metadata.l1_stalled = sol.stalled;
  best.metadata.mesh_size_warning = mesh_size < 10 * n;
  if (final_report) *final_report = best_report;
  return best;
}

double refine_objective(const MomentProblem& problem, const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& w, Eigen::VectorXd* gradient) {
  ResidualModel model(problem, static_cast<int>(x.rows()));
  Eigen::VectorXd theta = model.pack(x, w);
  if (!gradient) return model.objective(theta);
  Eigen::VectorXd r, jtr;
  Eigen::MatrixXd jtj;
  double f = model.assemble(theta, r, jtj, jtr);
  *gradient = 2.0 * jtr;
  return f;
}

VerifyReport verify(const QuadratureRule& rule, const MomentProblem& problem) {
  if (rule.dim() != problem.dim())
    throw std::invalid_argument("verify: dimension mismatch");
  VerifyReport report;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(problem.lambda().size());
  std::vector<double> values(problem.lambda().size());
  for (int i = 0; i < rule.size(); ++i) {
    Eigen::VectorXd x = rule.nodes.row(i);
    problem.basis.eval_point(x, values.data());
    for (std::size_t j = 0; j < values.size(); ++j)
      acc[j] += rule.weights[i] * values[j];
  }
  report.per_moment = acc - problem.moments;
  report.residual_l2 = report.per_moment.norm();
  report.residual_linf = report.per_moment.cwiseAbs().maxCoeff();
  return report;
}

QuasiOptimalityReport quasi_optimality_report(const QuadratureRule& rule,
                                              const MultiIndexSet& lambda,
                                              const std::vector<Basis1d>& factors) {
  auto half = maximal_half_set(lambda);
  QuasiOptimalityReport report;
  report.m = rule.size();
  report.l = half.size;
  report.is_quasi_optimal = (report.m == report.l);
  report.unique_half_set = half.unique;
  if (!report.is_quasi_optimal) return report;

  double worst = 0.0;
  for (const auto& theta : half.maximal) {
    TensorBasis basis(theta, factors);
    for (int j = 0; j < rule.size(); ++j) {
      Eigen::VectorXd x = rule.nodes.row(j);
      worst = std::max(worst, std::abs(rule.weights[j] - christoffel_lambda(basis, x)));
    }
  }
  report.weight_check = worst;
  return report;
}

QuadratureRule diagonal_gauss_rule(const Measure& mu, int n,
                                   const std::vector<int>& signs) {
  if (mu.kind() != Measure::Kind::tensor)
    throw std::invalid_argument("diagonal_gauss_rule: tensor measure required");
  const auto& factors = mu.factors();
  const int d = static_cast<int>(factors.size());
  for (int j = 1; j < d; ++j)
    if (factors[j].family != factors[0].family || factors[j].shift != factors[0].shift ||
        factors[j].scale != factors[0].scale)
      throw std::invalid_argument("diagonal_gauss_rule: factors must be identical");

  std::vector<int> sigma = signs.empty() ? std::vector<int>(d, 1) : signs;
  if (static_cast<int>(sigma.size()) != d)
    throw std::invalid_argument("diagonal_gauss_rule: need one sign per coordinate");
  bool flipped = false;
  for (int s : sigma) {
    if (s != 1 && s != -1)
      throw std::invalid_argument("diagonal_gauss_rule: signs must be +-1");
    if (s == -1) flipped = true;
  }
  // all named families are symmetric about their center, so flips are valid
  (void)flipped;

  const int m = n / 2 + 1;
  auto rule1d = gauss_rule(factors[0].recurrence(m + 1), m);

  QuadratureRule rule;
  rule.nodes.resize(m, d);
  rule.weights = rule1d.weights;
  const double center = factors[0].shift;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j)
      rule.nodes(i, j) = center + sigma[j] * (rule1d.nodes[i] - center);
  rule.metadata.success = true;
  rule.metadata.m_requested = m;
  return rule;
}

}  // namespace quadgen
