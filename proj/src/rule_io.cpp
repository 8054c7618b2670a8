#include "quadgen/rule_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace quadgen {

using nlohmann::json;

nlohmann::json index_set_to_json(const MultiIndexSet& lambda) {
  json arr = json::array();
  for (const auto& alpha : lambda) arr.push_back(alpha);
  return arr;
}

MultiIndexSet index_set_from_json(const json& j) {
  std::vector<MultiIndex> indices;
  for (const auto& row : j) indices.push_back(row.get<MultiIndex>());
  if (indices.empty()) throw std::invalid_argument("index_set_from_json: empty set");
  return MultiIndexSet(static_cast<int>(indices.front().size()), std::move(indices));
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const int cols = static_cast<int>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

json rule_to_json(const QuadratureRule& rule, const MultiIndexSet& lambda) {
  json j;
  j["schema"] = "quadgen/rule/1";
  j["dim"] = rule.dim();
  j["index_set"] = index_set_to_json(lambda);
  j["nodes"] = matrix_to_json(rule.nodes);
  j["weights"] = vector_to_json(rule.weights);
  j["residual_l2"] = rule.residual_l2;
  j["metadata"] = {{"lambda_digest", rule.metadata.lambda_digest},
                   {"measure_digest", rule.metadata.measure_digest},
                   {"seed", rule.metadata.seed},
                   {"m_requested", rule.metadata.m_requested},
                   {"increments_used", rule.metadata.increments_used},
                   {"iterations", rule.metadata.iterations},
                   {"l1_support", rule.metadata.l1_support},
                   {"l1_residual_linf", rule.metadata.l1_residual_linf},
                   {"l1_stalled", rule.metadata.l1_stalled},
                   {"mesh_size_warning", rule.metadata.mesh_size_warning},
                   {"success", rule.metadata.success},
                   {"objective", rule.metadata.objective}};
  return j;
}

QuadratureRule rule_from_json(const json& j, MultiIndexSet* lambda) {
  if (j.value("schema", "") != "quadgen/rule/1")
    throw std::invalid_argument("rule_from_json: unknown schema");
  QuadratureRule rule;
  rule.nodes = matrix_from_json(j.at("nodes"));
  rule.weights = vector_from_json(j.at("weights"));
  rule.residual_l2 = j.at("residual_l2").get<double>();
  const auto& meta = j.at("metadata");
  rule.metadata.lambda_digest = meta.value("lambda_digest", "");
  rule.metadata.measure_digest = meta.value("measure_digest", "");
  rule.metadata.seed = meta.value("seed", 0ull);
  rule.metadata.m_requested = meta.value("m_requested", 0);
  rule.metadata.increments_used = meta.value("increments_used", 0);
  rule.metadata.iterations = meta.value("iterations", 0);
  rule.metadata.l1_support = meta.value("l1_support", 0);
  rule.metadata.l1_residual_linf = meta.value("l1_residual_linf", 0.0);
  rule.metadata.l1_stalled = meta.value("l1_stalled", false);
  rule.metadata.mesh_size_warning = meta.value("mesh_size_warning", false);
  rule.metadata.success = meta.value("success", false);
  rule.metadata.objective = meta.value("objective", 0.0);
  if (lambda) *lambda = index_set_from_json(j.at("index_set"));
  return rule;
}

json moments_to_json(const MomentProblem& problem) {
  json j;
  j["schema"] = "quadgen/moments/1";
  j["dim"] = problem.dim();
  j["index_set"] = index_set_to_json(problem.lambda());
  j["moments"] = vector_to_json(problem.moments);
  j["measure"] = problem.measure_name;
  j["basis"] = problem.basis.mix() ? "bounding-box-orthonormal+gram" : "orthonormal";
  return j;
}

namespace {

Family family_from_string(const std::string& name) {
  if (name == "uniform" || name == "legendre") return Family::uniform;
  if (name == "jacobi11" || name == "jacobi") return Family::jacobi11;
  if (name == "gaussian" || name == "hermite") return Family::gaussian;
  throw std::invalid_argument("unknown family: " + name);
}

Box box_from_json(const json& j) {
  Box box;
  box.lower = vector_from_json(j.at("lower"));
  box.upper = vector_from_json(j.at("upper"));
  if (box.lower.size() != box.upper.size())
    throw std::invalid_argument("box: lower/upper size mismatch");
  return box;
}

}  // namespace

Measure measure_from_json(const json& config) {
  const json& j = config.contains("measure") ? config.at("measure") : config;
  const std::string type = j.at("type").get<std::string>();

  if (type == "tensor") {
    std::vector<std::string> names = j.at("families").get<std::vector<std::string>>();
    std::vector<TensorFactor> factors(names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
      factors[i].family = family_from_string(names[i]);
    if (j.contains("box")) {
      Box box = box_from_json(j.at("box"));
      if (box.dim() != static_cast<int>(names.size()))
        throw std::invalid_argument("tensor measure: box dimension mismatch");
      for (int i = 0; i < box.dim(); ++i) {
        factors[i].shift = 0.5 * (box.lower[i] + box.upper[i]);
        factors[i].scale = 0.5 * (box.upper[i] - box.lower[i]);
      }
    }
    return Measure::tensor(std::move(factors));
  }
  if (type == "density") {
    const std::string name = j.at("name").get<std::string>();
    if (name != "banana")
      throw std::invalid_argument("density measure: only 'banana' is built in");
    if (j.contains("box")) return banana_measure_mapped(box_from_json(j.at("box")));
    return banana_measure();
  }
  if (type == "empirical") {
    return Measure::empirical(read_csv_matrix(j.at("csv").get<std::string>()));
  }
  if (type == "ridge") {
    Eigen::MatrixXd a = matrix_from_json(j.at("generator"));
    int probes = j.value("probe_count", 0);
    std::uint64_t seed = j.value("probe_seed", 1ull);
    Domain dom = zonotope_build(a, probes, seed);
    return Measure::ridge(static_cast<int>(a.cols()), a, dom,
                          j.value("orthonormal", true));
  }
  throw std::invalid_argument("unknown measure type: " + type);
}

json measure_to_json(const Measure& mu) {
  json j;
  switch (mu.kind()) {
    case Measure::Kind::tensor: {
      j["type"] = "tensor";
      json fams = json::array();
      for (const auto& f : mu.factors())
        fams.push_back(f.family == Family::uniform    ? "uniform"
                       : f.family == Family::jacobi11 ? "jacobi11"
                                                      : "gaussian");
      j["families"] = fams;
      j["box"] = {{"lower", vector_to_json(mu.domain().bounding_box().lower)},
                  {"upper", vector_to_json(mu.domain().bounding_box().upper)}};
      break;
    }
    case Measure::Kind::density:
      j["type"] = "density";
      j["name"] = mu.name();
      j["box"] = {{"lower", vector_to_json(mu.domain().box().lower)},
                  {"upper", vector_to_json(mu.domain().box().upper)}};
      break;
    case Measure::Kind::empirical:
      j["type"] = "empirical";
      j["rows"] = mu.samples().rows();
      break;
    case Measure::Kind::ridge:
      j["type"] = "ridge";
      j["generator"] = matrix_to_json(mu.ridge_matrix());
      break;
  }
  return j;
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::runtime_error("csv: ragged rows in " + path);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace quadgen
