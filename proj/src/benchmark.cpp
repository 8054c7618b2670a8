#include "quadgen/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

#include "quadgen/baselines.hpp"
#include "quadgen/rule_io.hpp"

namespace quadgen {

namespace {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct TaskResult {
  int n_points = 0;
  double estimate = 0.0;
  bool secondary_valid = false;  // l1-initial piggybacking on a reduced run
  int secondary_points = 0;
  double secondary_estimate = 0.0;
};

// everything a worker needs, fixed before the pool starts
struct Context {
  BenchmarkSpec spec;
  Integrand f;                    // on the rule domain (box coordinates)
  Measure mu = uniform_measure(Box::centered_cube(1));
  bool density_folding = false;   // baselines integrate f*rho with uniform rules
  bool ridge = false;
  Eigen::MatrixXd ridge_a;        // s x d for chem-ridge
  Integrand f_highdim;            // d-dimensional integrand for ridge baselines
  std::map<int, MomentProblem> problems;  // per degree
  double reference = 0.0;
};

double folded_estimate(const Context& ctx, const Eigen::MatrixXd& nodes,
                       const Eigen::VectorXd& weights) {
  // self-normalized ratio: sum w f rho / sum w rho
  double num = 0.0, den = 0.0;
  for (int i = 0; i < nodes.rows(); ++i) {
    Eigen::VectorXd x = nodes.row(i);
    double rho = ctx.mu.density_at(x);
    num += weights[i] * ctx.f(x) * rho;
    den += weights[i] * rho;
  }
  return num / den;
}

Box unit_box(int dim) {
  Box b;
  b.lower = Eigen::VectorXd::Zero(dim);
  b.upper = Eigen::VectorXd::Ones(dim);
  return b;
}

void build_context(Context& ctx) {
  const BenchmarkSpec& spec = ctx.spec;
  auto lambda_for = [&](int degree) {
    return spec.anova_order > 0
               ? MultiIndexSet::anova_set(spec.dim == 20 && ctx.ridge ? 2 : spec.dim,
                                          spec.anova_order, degree)
               : MultiIndexSet::total_degree_set(ctx.ridge ? 2 : spec.dim, degree);
  };

  if (spec.integrand == "cp" || spec.integrand == "mcp") {
    auto c = corner_peak_coefficients(spec.dim, spec.coeff_seed);
    ctx.f = spec.integrand == "cp" ? corner_peak(c) : modified_corner_peak(c);
    ctx.mu = uniform_measure(unit_box(spec.dim));
    ctx.reference = *ctx.f.reference_mean;
    for (int k : spec.degrees)
      ctx.problems.emplace(k, make_tensor_problem(ctx.mu, lambda_for(k)));
    return;
  }

  if (spec.integrand == "chem") {
    Box box;
    if (!spec.measure.is_null() && spec.measure.contains("box")) {
      box.lower = Eigen::VectorXd(2);
      box.upper = Eigen::VectorXd(2);
      for (int i = 0; i < 2; ++i) {
        box.lower[i] = spec.measure["box"]["lower"][i].get<double>();
        box.upper[i] = spec.measure["box"]["upper"][i].get<double>();
      }
    } else {
      box.lower = Eigen::VectorXd(2);
      box.upper = Eigen::VectorXd(2);
      box.lower << 0.0, 5.0;
      box.upper << 4.5, 35.0;
    }
    ctx.mu = banana_measure_mapped(box);
    ctx.f = chemical_integrand();
    ctx.density_folding = true;
    Eigen::MatrixXd moment_samples;
    if (spec.sample_moments > 0)
      moment_samples = ctx.mu.sample(spec.sample_moments, mix_seed(spec.seed, 77, 0));
    for (int k : spec.degrees) {
      if (spec.sample_moments > 0)
        ctx.problems.emplace(k, make_sample_problem(ctx.mu, lambda_for(k),
                                                    moment_samples, spec.seed, false));
      else
        ctx.problems.emplace(k, make_density_problem(ctx.mu, lambda_for(k), spec.seed));
    }
    // reference: Sobol with density folding over the box
    auto pts = sobol_points(2, static_cast<int>(spec.reference_samples), 1);
    Eigen::MatrixXd nodes(pts.rows(), 2);
    for (int i = 0; i < pts.rows(); ++i)
      for (int j = 0; j < 2; ++j)
        nodes(i, j) = box.lower[j] + (box.upper[j] - box.lower[j]) * pts(i, j);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(nodes.rows(), 1.0 / nodes.rows());
    ctx.reference = folded_estimate(ctx, nodes, w);
    return;
  }

  if (spec.integrand == "chem-ridge") {
    ctx.ridge = true;
    ctx.ridge_a = random_orthonormal_rows(2, spec.dim, spec.coeff_seed);
    Domain zono = zonotope_build(ctx.ridge_a, 0, mix_seed(spec.seed, 5, 5));
    Measure ridge_mu = Measure::ridge(spec.dim, ctx.ridge_a, zono, true);

    // center the projected density over the nonlinear response region
    Box d1;
    d1.lower = Eigen::VectorXd(2);
    d1.upper = Eigen::VectorXd(2);
    d1.lower << 0.0, 5.0;
    d1.upper << 4.5, 35.0;
    AffineMap to_d1 = affine_map_box(zono.bounding_box(), d1);

    Integrand g;
    g.dim = 2;
    g.name = "chem-mapped";
    g.f = [to_d1](const Eigen::VectorXd& x) {
      return chemical_model(to_d1.apply(x));
    };
    ctx.f = g;  // on zonotope coordinates
    ctx.f_highdim = ridge_integrand(g, ctx.ridge_a);
    ctx.mu = ridge_mu;
    for (int k : spec.degrees)
      ctx.problems.emplace(k, make_ridge_problem(ridge_mu, lambda_for(k), spec.seed));

    auto pts = sobol_points(spec.dim, static_cast<int>(spec.reference_samples), 1);
    double acc = 0.0;
    Eigen::VectorXd y(spec.dim);
    for (int i = 0; i < pts.rows(); ++i) {
      for (int j = 0; j < spec.dim; ++j) y[j] = 2.0 * pts(i, j) - 1.0;
      acc += ctx.f_highdim(y);
    }
    ctx.reference = acc / pts.rows();
    return;
  }

  throw std::invalid_argument("run_benchmark: unknown integrand " + ctx.spec.integrand);
}

double baseline_estimate(const Context& ctx, const BaselineRule& rule) {
  if (ctx.density_folding) return folded_estimate(ctx, rule.nodes, rule.weights);
  return rule.integrate(ctx.f.f);
}

}  // namespace

BenchmarkSpec benchmark_spec_from_json(const nlohmann::json& j) {
  BenchmarkSpec spec;
  spec.integrand = j.value("integrand", spec.integrand);
  spec.dim = j.value("dim", spec.dim);
  spec.coeff_seed = j.value("coeff_seed", spec.coeff_seed);
  if (j.contains("measure")) spec.measure = j.at("measure");
  if (j.contains("methods")) spec.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("degrees")) spec.degrees = j.at("degrees").get<std::vector<int>>();
  if (j.contains("sizes")) spec.sizes = j.at("sizes").get<std::vector<int>>();
  if (j.contains("levels")) spec.levels = j.at("levels").get<std::vector<int>>();
  spec.anova_order = j.value("anova_order", spec.anova_order);
  spec.sample_moments = j.value("sample_moments", spec.sample_moments);
  spec.repetitions = j.value("repetitions", spec.repetitions);
  spec.seed = j.value("seed", spec.seed);
  spec.reference_samples = j.value("reference_samples", spec.reference_samples);
  spec.mesh_size = j.value("mesh_size", spec.mesh_size);
  if (spec.repetitions < 1) throw std::invalid_argument("benchmark: repetitions >= 1");
  return spec;
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec) {
  Context ctx;
  ctx.spec = spec;
  build_context(ctx);

  bool want_reduced = false, want_l1 = false;
  for (const auto& m : spec.methods) {
    if (m == "reduced") want_reduced = true;
    if (m == "l1-initial") want_l1 = true;
  }

  struct Pending {
    std::string method;  // "reduced" marks the shared reduced/l1 run
    int param = 0;
    int rep = 0;
  };
  std::vector<Pending> tasks;
  for (const auto& method : spec.methods) {
    if (method == "reduced" || method == "l1-initial") continue;  // added below
    if (method == "mc") {
      for (int n : spec.sizes)
        for (int rep = 0; rep < spec.repetitions; ++rep)
          tasks.push_back({"mc", n, rep});
    } else if (method == "sobol") {
      for (int n : spec.sizes) tasks.push_back({"sobol", n, 0});
    } else if (method == "sparse-grid") {
      for (int level : spec.levels) tasks.push_back({"sparse-grid", level, 0});
    } else if (method == "stroud2" || method == "stroud3") {
      tasks.push_back({method, method == "stroud2" ? 2 : 3, 0});
    } else {
      throw std::invalid_argument("run_benchmark: unknown method " + method);
    }
  }
  if (want_reduced || want_l1)
    for (int k : spec.degrees)
      for (int rep = 0; rep < spec.repetitions; ++rep)
        tasks.push_back({"reduced", k, rep});

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Pending& task = tasks[t];
      TaskResult& out = results[t];
      if (task.method == "reduced") {
        const MomentProblem& problem = ctx.problems.at(task.param);
        GenerateOptions opts;
        opts.seed = mix_seed(spec.seed, task.param, task.rep);
        opts.mesh_size = spec.mesh_size;
        SparseSolution stage_one;
        CandidateMesh mesh =
            candidate_mesh(problem.domain,
                           opts.mesh_size > 0 ? opts.mesh_size
                                              : std::max(10 * problem.lambda().size(), 1000),
                           opts.seed);
        QuadratureRule rule = generate(problem, opts, nullptr, &stage_one);
        out.n_points = rule.size();
        out.estimate = ctx.ridge ? ridge_rule_estimate(rule, ctx.f_highdim, ctx.ridge_a)
                                 : rule.integrate(ctx.f.f);
        // the l1 stage of the same run
        QuadratureRule init;
        init.nodes.resize(stage_one.support.size(), problem.dim());
        for (std::size_t i = 0; i < stage_one.support.size(); ++i)
          init.nodes.row(i) = mesh.points.row(stage_one.support[i]);
        init.weights = stage_one.weights;
        if (init.size() > 0) {
          out.secondary_valid = true;
          out.secondary_points = init.size();
          out.secondary_estimate =
              ctx.ridge ? ridge_rule_estimate(init, ctx.f_highdim, ctx.ridge_a)
                        : init.integrate(ctx.f.f);
        }
      } else if (task.method == "mc") {
        // mu-samples need no folding; ridge samples already carry the
        // pushforward law, so g on the zonotope equals the full-space estimator
        auto rule = monte_carlo_rule(ctx.mu, task.param,
                                     mix_seed(spec.seed, 1000 + task.param, task.rep));
        out.n_points = task.param;
        out.estimate = rule.integrate(ctx.f.f);
      } else if (task.method == "sobol") {
        int dim = ctx.ridge ? spec.dim : ctx.mu.dim();
        auto pts = sobol_points(dim, task.param, 1);
        BaselineRule rule;
        rule.nodes.resize(task.param, dim);
        const Box& box = ctx.ridge ? Box::centered_cube(dim) : ctx.mu.domain().bounding_box();
        for (int i = 0; i < task.param; ++i)
          for (int j = 0; j < dim; ++j)
            rule.nodes(i, j) = box.lower[j] + (box.upper[j] - box.lower[j]) * pts(i, j);
        rule.weights = Eigen::VectorXd::Constant(task.param, 1.0 / task.param);
        out.n_points = task.param;
        out.estimate = ctx.ridge ? rule.integrate(ctx.f_highdim.f)
                                 : baseline_estimate(ctx, rule);
      } else if (task.method == "sparse-grid") {
        int dim = ctx.ridge ? spec.dim : ctx.mu.dim();
        auto rule = sparse_grid(dim, task.param);
        if (!ctx.ridge) {
          const Box& box = ctx.mu.domain().bounding_box();
          for (int i = 0; i < rule.size(); ++i)
            for (int j = 0; j < dim; ++j)
              rule.nodes(i, j) = 0.5 * (box.lower[j] + box.upper[j]) +
                                 0.5 * (box.upper[j] - box.lower[j]) * rule.nodes(i, j);
        }
        out.n_points = rule.size();
        out.estimate = ctx.ridge ? rule.integrate(ctx.f_highdim.f)
                                 : baseline_estimate(ctx, rule);
      } else {  // stroud2 / stroud3
        int dim = ctx.ridge ? spec.dim : ctx.mu.dim();
        auto rule = stroud(dim, task.param);
        if (!ctx.ridge) {
          const Box& box = ctx.mu.domain().bounding_box();
          for (int i = 0; i < rule.size(); ++i)
            for (int j = 0; j < dim; ++j)
              rule.nodes(i, j) = 0.5 * (box.lower[j] + box.upper[j]) +
                                 0.5 * (box.upper[j] - box.lower[j]) * rule.nodes(i, j);
        }
        out.n_points = rule.size();
        out.estimate = ctx.ridge ? rule.integrate(ctx.f_highdim.f)
                                 : baseline_estimate(ctx, rule);
      }
    }
  };

  unsigned n_threads = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                             static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::vector<BenchmarkRow> rows;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Pending& task = tasks[t];
    const TaskResult& res = results[t];
    if (task.method == "reduced") {
      if (want_reduced)
        rows.push_back({"reduced", task.param, res.n_points, task.rep,
                        std::abs(res.estimate - ctx.reference), 0, 0, 0});
      if (want_l1 && res.secondary_valid)
        rows.push_back({"l1-initial", task.param, res.secondary_points, task.rep,
                        std::abs(res.secondary_estimate - ctx.reference), 0, 0, 0});
    } else {
      rows.push_back({task.method, task.param, res.n_points, task.rep,
                      std::abs(res.estimate - ctx.reference), 0, 0, 0});
    }
  }

  // aggregate per (method, param)
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& row : rows) groups[{row.method, row.param}].push_back(row.abs_error);
  for (auto& [key, errs] : groups) std::sort(errs.begin(), errs.end());
  for (auto& row : rows) {
    const auto& errs = groups[{row.method, row.param}];
    row.min_error = errs.front();
    row.max_error = errs.back();
    row.median_error = errs[errs.size() / 2];
    if (errs.size() % 2 == 0)
      row.median_error = 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
  }

  std::stable_sort(rows.begin(), rows.end(), [&](const BenchmarkRow& a,
                                                 const BenchmarkRow& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.param != b.param) return a.param < b.param;
    return a.rep < b.rep;
  });
  return rows;
}

void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "method,param,n_points,rep,abs_error,median_error,min_error,max_error\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                  row.method.c_str(), row.param, row.n_points, row.rep, row.abs_error,
                  row.median_error, row.min_error, row.max_error);
    out << buf;
  }
}

}  // namespace quadgen
