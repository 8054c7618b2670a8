#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "quadgen/baselines.hpp"
#include "quadgen/benchmark.hpp"
#include "quadgen/rule_io.hpp"
#include "quadgen/testmodels.hpp"

using namespace quadgen;
using nlohmann::json;

namespace {

MultiIndexSet build_index_set(int dim, int degree, int anova_order, double pnorm,
                              int cap) {
  if (anova_order > 0) return MultiIndexSet::anova_set(dim, anova_order, degree);
  if (pnorm > 0.0 && pnorm != 1.0)
    return MultiIndexSet::ball_set(dim, pnorm, degree,
                                   cap > 0 ? std::optional<int>(cap) : std::nullopt);
  return MultiIndexSet::total_degree_set(dim, degree);
}

MomentProblem build_problem(const Measure& mu, const MultiIndexSet& lambda,
                            long sample_moments, std::uint64_t seed) {
  switch (mu.kind()) {
    case Measure::Kind::tensor:
      return make_tensor_problem(mu, lambda);
    case Measure::Kind::density:
      if (sample_moments > 0)
        return make_sample_problem(mu, lambda,
                                   mu.sample(sample_moments, seed ^ 0xabcdefull), seed,
                                   false);
      return make_density_problem(mu, lambda, seed);
    case Measure::Kind::empirical:
      return make_sample_problem(mu, lambda, mu.samples(), seed, false);
    case Measure::Kind::ridge:
      return make_ridge_problem(mu, lambda, seed);
  }
  throw std::logic_error("build_problem: unknown measure kind");
}

int run_indexset(int dim, int degree, int anova_order, double pnorm, int cap,
                 const std::string& out) {
  auto lambda = build_index_set(dim, degree, anova_order, pnorm, cap);
  json j;
  j["schema"] = "quadgen/indexset/1";
  j["dim"] = dim;
  j["size"] = lambda.size();
  j["heuristic_m"] = heuristic_size(lambda);
  if (lambda.is_downward_closed()) {
    auto half = maximal_half_set(lambda);
    j["half_set_bound"] = half.size;
    j["half_set_unique"] = half.unique;
    j["heuristic_m_floored"] = std::max(heuristic_size(lambda), half.size);
  }
  j["indices"] = index_set_to_json(lambda);
  if (!out.empty()) write_json_file(out, j);
  json summary = j;
  summary.erase("indices");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_gauss(const std::string& family, int m, double radau_c, bool radau) {
  Recurrence rec = family_recurrence(
      family == "uniform" ? Family::uniform
      : family == "jacobi11" ? Family::jacobi11
                             : Family::gaussian,
      m + 2);
  UnivariateRule rule = radau ? radau_family_rule(rec, m, radau_c) : gauss_rule(rec, m);
  json j;
  j["schema"] = "quadgen/univariate-rule/1";
  j["family"] = family;
  j["nodes"] = std::vector<double>(rule.nodes.data(), rule.nodes.data() + m);
  j["weights"] = std::vector<double>(rule.weights.data(), rule.weights.data() + m);
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadgen: positive multivariate quadrature by moment matching"};
  app.require_subcommand(1);

  // indexset
  auto* cmd_idx = app.add_subcommand("indexset", "index set sizes and half-set bound");
  int dim = 2, degree = 3, anova_order = 0, cap = 0;
  double pnorm = 1.0;
  std::string out_path;
  cmd_idx->add_option("--dim", dim)->required();
  cmd_idx->add_option("--degree", degree)->required();
  cmd_idx->add_option("--anova-order", anova_order);
  cmd_idx->add_option("--pnorm", pnorm);
  cmd_idx->add_option("--cap", cap);
  cmd_idx->add_option("--out", out_path);

  // gauss
  auto* cmd_gauss = app.add_subcommand("gauss", "univariate Gauss/Radau-family rules");
  std::string family = "uniform";
  int gauss_m = 3;
  double radau_c = 0.0;
  bool radau = false;
  cmd_gauss->add_option("--family", family)
      ->check(CLI::IsMember({"uniform", "jacobi11", "gaussian"}));
  cmd_gauss->add_option("-M,--points", gauss_m)->required();
  cmd_gauss->add_flag("--radau", radau);
  cmd_gauss->add_option("--radau-c", radau_c);

  // moments
  auto* cmd_mom = app.add_subcommand("moments", "compute and store a moment vector");
  std::string measure_path, mom_out;
  long sample_moments = 0;
  std::uint64_t seed = 1;
  cmd_mom->add_option("--measure", measure_path)->required();
  cmd_mom->add_option("--degree", degree)->required();
  cmd_mom->add_option("--anova-order", anova_order);
  cmd_mom->add_option("--sample-moments", sample_moments);
  cmd_mom->add_option("--seed", seed);
  cmd_mom->add_option("--out", mom_out)->required();

  // generate
  auto* cmd_gen = app.add_subcommand("generate", "generate a reduced quadrature rule");
  std::string rule_out = "rule.json", dump_initial;
  int mesh_size = 0, max_increments = 10;
  double eps_l1 = 1e-8;
  cmd_gen->add_option("--measure", measure_path)->required();
  cmd_gen->add_option("--degree", degree)->required();
  cmd_gen->add_option("--anova-order", anova_order);
  cmd_gen->add_option("--seed", seed);
  cmd_gen->add_option("--out", rule_out);
  cmd_gen->add_option("--mesh-size", mesh_size);
  cmd_gen->add_option("--eps", eps_l1);
  cmd_gen->add_option("--max-increments", max_increments);
  cmd_gen->add_option("--sample-moments", sample_moments);
  cmd_gen->add_option("--dump-initial", dump_initial);

  // verify
  auto* cmd_ver = app.add_subcommand("verify", "recompute the residuals of a rule");
  std::string rule_path;
  double tol = 1e-8;
  bool per_moment = false;
  cmd_ver->add_option("rule", rule_path)->required();
  cmd_ver->add_option("--measure", measure_path)->required();
  cmd_ver->add_option("--tol", tol);
  cmd_ver->add_flag("--per-moment", per_moment);
  cmd_ver->add_option("--sample-moments", sample_moments);
  cmd_ver->add_option("--seed", seed);

  // baseline
  auto* cmd_base = app.add_subcommand("baseline", "comparison integrators");
  std::string kind = "mc";
  int size = 128, level = 2;
  cmd_base->add_option("--kind", kind)
      ->check(CLI::IsMember({"mc", "sobol", "sparse-grid", "stroud2", "stroud3"}));
  cmd_base->add_option("--dim", dim)->required();
  cmd_base->add_option("--size", size);
  cmd_base->add_option("--level", level);
  cmd_base->add_option("--seed", seed);
  cmd_base->add_option("--out", out_path);

  // benchmark
  auto* cmd_bench = app.add_subcommand("benchmark", "convergence experiments to CSV");
  std::string bench_config, csv_out = "convergence.csv";
  cmd_bench->add_option("--config", bench_config)->required();
  cmd_bench->add_option("--out", csv_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2
  }

  try {
    if (cmd_idx->parsed())
      return run_indexset(dim, degree, anova_order, pnorm, cap, out_path);

    if (cmd_gauss->parsed()) return run_gauss(family, gauss_m, radau_c, radau);

    if (cmd_mom->parsed()) {
      Measure mu = measure_from_json(read_json_file(measure_path));
      auto lambda = build_index_set(mu.dim(), degree, anova_order, 1.0, 0);
      auto problem = build_problem(mu, lambda, sample_moments, seed);
      write_json_file(mom_out, moments_to_json(problem));
      std::cout << "wrote " << mom_out << " (" << problem.moments.size()
                << " moments)\n";
      return 0;
    }

    if (cmd_gen->parsed()) {
      Measure mu = measure_from_json(read_json_file(measure_path));
      auto lambda = build_index_set(mu.dim(), degree, anova_order, 1.0, 0);
      auto problem = build_problem(mu, lambda, sample_moments, seed);
      GenerateOptions opts;
      opts.seed = seed;
      opts.mesh_size = mesh_size;
      opts.eps_l1 = eps_l1;
      opts.max_increments = max_increments;
      SparseSolution stage_one;
      QuadratureRule rule = generate(problem, opts, nullptr, &stage_one);
      write_json_file(rule_out, rule_to_json(rule, lambda));
      if (!dump_initial.empty()) {
        CandidateMesh mesh = candidate_mesh(
            problem.domain,
            mesh_size > 0 ? mesh_size : std::max(10 * lambda.size(), 1000), seed);
        QuadratureRule init;
        init.nodes.resize(stage_one.support.size(), problem.dim());
        for (std::size_t i = 0; i < stage_one.support.size(); ++i)
          init.nodes.row(i) = mesh.points.row(stage_one.support[i]);
        init.weights = stage_one.weights;
        init.residual_l2 = stage_one.residual_l2;
        write_json_file(dump_initial, rule_to_json(init, lambda));
      }
      std::printf("points=%d residual_l2=%.3e success=%d increments=%d\n",
                  rule.size(), rule.residual_l2, rule.metadata.success ? 1 : 0,
                  rule.metadata.increments_used);
      return rule.metadata.success ? 0 : 1;
    }

    if (cmd_ver->parsed()) {
      Measure mu = measure_from_json(read_json_file(measure_path));
      MultiIndexSet lambda(1, {MultiIndex{0}});
      QuadratureRule rule = rule_from_json(read_json_file(rule_path), &lambda);
      auto problem = build_problem(mu, lambda, sample_moments, seed);
      auto report = verify(rule, problem);
      std::printf("residual_l2=%.6e residual_linf=%.6e\n", report.residual_l2,
                  report.residual_linf);
      if (per_moment)
        for (int j = 0; j < report.per_moment.size(); ++j)
          std::printf("%-18s % .6e\n", to_string(problem.lambda()[j]).c_str(),
                      report.per_moment[j]);
      return report.residual_l2 <= tol ? 0 : 1;
    }

    if (cmd_base->parsed()) {
      BaselineRule rule;
      if (kind == "mc")
        rule = monte_carlo_rule(uniform_measure(Box::centered_cube(dim)), size, seed);
      else if (kind == "sobol")
        rule = sobol_rule(dim, size, 1, true);
      else if (kind == "sparse-grid")
        rule = sparse_grid(dim, level);
      else
        rule = stroud(dim, kind == "stroud2" ? 2 : 3);
      json j;
      j["schema"] = "quadgen/baseline/1";
      j["kind"] = kind;
      j["n_points"] = rule.size();
      if (!out_path.empty()) {
        json nodes = json::array();
        for (int i = 0; i < rule.size(); ++i) {
          json row = json::array();
          for (int c = 0; c < rule.nodes.cols(); ++c) row.push_back(rule.nodes(i, c));
          nodes.push_back(row);
        }
        j["nodes"] = nodes;
        j["weights"] = std::vector<double>(rule.weights.data(),
                                           rule.weights.data() + rule.size());
        write_json_file(out_path, j);
        j.erase("nodes");
        j.erase("weights");
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (cmd_bench->parsed()) {
      BenchmarkSpec spec = benchmark_spec_from_json(read_json_file(bench_config));
      auto rows = run_benchmark(spec);
      write_benchmark_csv(csv_out, rows);
      std::cout << "wrote " << csv_out << " (" << rows.size() << " rows)\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
