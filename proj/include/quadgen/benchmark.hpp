#ifndef QUADGEN_BENCHMARK_HPP
#define QUADGEN_BENCHMARK_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "quadgen/testmodels.hpp"

namespace quadgen {

/// Convergence experiment: one integrand, a method roster, and per-method
/// size sweeps, repeated over seeds.
struct BenchmarkSpec {
  std::string integrand = "cp";  // cp | mcp | chem | chem-ridge
  int dim = 2;
  std::uint64_t coeff_seed = 101;      // corner-peak coefficients / ridge matrix
  nlohmann::json measure;              // chem: banana box override
  std::vector<std::string> methods{"reduced"};
  std::vector<int> degrees{1, 2, 3};   // reduced / l1-initial sweep
  std::vector<int> sizes{16, 64, 256}; // mc / sobol sweep
  std::vector<int> levels{0, 1, 2};    // sparse-grid sweep
  int anova_order = 0;                 // 0: total-degree index sets
  long sample_moments = 0;             // >0: moments from this many mu-samples
  int repetitions = 10;
  std::uint64_t seed = 1;
  long reference_samples = 1000000;    // Sobol reference when no closed form
  int mesh_size = 0;                   // generate() override, 0 = default
};

struct BenchmarkRow {
  std::string method;
  int param = 0;
  int n_points = 0;
  int rep = 0;
  double abs_error = 0.0;
  double median_error = 0.0;  // aggregates over the (method, param) group
  double min_error = 0.0;
  double max_error = 0.0;
};

BenchmarkSpec benchmark_spec_from_json(const nlohmann::json& j);

/// Runs every (method, sweep point, repetition) in a small work pool;
/// output rows are deterministically ordered and reproducible per seed.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec);

void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows);

}  // namespace quadgen

#endif
