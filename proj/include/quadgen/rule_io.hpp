#ifndef QUADGEN_RULE_IO_HPP
#define QUADGEN_RULE_IO_HPP

#include <string>

#include <json.hpp>

#include "quadgen/l1init.hpp"
#include "quadgen/moments.hpp"
#include "quadgen/reduce.hpp"

namespace quadgen {

nlohmann::json index_set_to_json(const MultiIndexSet& lambda);
MultiIndexSet index_set_from_json(const nlohmann::json& j);

nlohmann::json rule_to_json(const QuadratureRule& rule, const MultiIndexSet& lambda);
QuadratureRule rule_from_json(const nlohmann::json& j, MultiIndexSet* lambda = nullptr);

nlohmann::json moments_to_json(const MomentProblem& problem);

/// Measure declaration:
///   {"type":"tensor","families":[...],"box":{"lower":[...],"upper":[...]}}
///   {"type":"density","name":"banana","box":{...}}           (box optional)
///   {"type":"empirical","csv":"samples.csv"}
///   {"type":"ridge","generator":[[...]],"probe_seed":1}
/// A top-level {"measure": {...}} wrapper is also accepted.
Measure measure_from_json(const nlohmann::json& config);
nlohmann::json measure_to_json(const Measure& mu);

Eigen::MatrixXd read_csv_matrix(const std::string& path);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace quadgen

#endif
