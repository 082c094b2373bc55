#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "iscan/detect.hpp"
#include "iscan/eval.hpp"
#include "iscan/graph.hpp"
#include "iscan/score.hpp"
#include "iscan/simulate.hpp"
#include "iscan/structure.hpp"

namespace iscan {

// Malformed CSV input; the message carries file/row/column diagnostics.
struct CsvError : std::runtime_error {
  explicit CsvError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shortest decimal string that round-trips to the same double. Locale free.
std::string format_double(double value);

// Comma-separated, decimal point, mandatory header row, LF line endings.
// Lines starting with '#' ahead of the header carry provenance comments and
// are skipped on read. No quoting; names must not contain commas or newlines.
void write_csv(const std::string& path, const EnvironmentData& env,
               const std::vector<std::string>& comments = {});
EnvironmentData read_csv(const std::string& path);

// Header + numeric matrix variant for diagnostic exports.
void write_csv_table(const std::string& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& values, const std::vector<std::string>& comments = {});

// DOT digraph over num_nodes nodes with the diff edges drawn in red, mirror
// of to_dot() for full graphs. Node names default to x0..x{d-1}.
std::string diff_edges_to_dot(const DiffEdges& diff, int num_nodes,
                              const std::vector<std::string>& names = {});

NLOHMANN_JSON_SERIALIZE_ENUM(NoiseFamily, {{NoiseFamily::Gaussian, "gaussian"},
                                           {NoiseFamily::Gumbel, "gumbel"},
                                           {NoiseFamily::Laplace, "laplace"}})
NLOHMANN_JSON_SERIALIZE_ENUM(GraphSpec::Model,
                             {{GraphSpec::Model::Er, "er"}, {GraphSpec::Model::Sf, "sf"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ShiftKind, {{ShiftKind::FunctionalOnly, "functional_only"},
                                         {ShiftKind::EdgeDeletion, "edge_deletion"},
                                         {ShiftKind::MixedC3, "mixed_c3"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BaseMechanism, {{BaseMechanism::SinSquare, "sin_square"},
                                             {BaseMechanism::GpRff, "gp_rff"}})
NLOHMANN_JSON_SERIALIZE_ENUM(GpShift, {{GpShift::Independent, "independent"},
                                       {GpShift::Scaled, "scaled"}})
NLOHMANN_JSON_SERIALIZE_ENUM(KernelConfig::Bandwidth,
                             {{KernelConfig::Bandwidth::MedianHeuristic, "median_heuristic"},
                              {KernelConfig::Bandwidth::Fixed, "fixed"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DetectConfig::Selection,
                             {{DetectConfig::Selection::Threshold, "threshold"},
                              {DetectConfig::Selection::Elbow, "elbow"}})
NLOHMANN_JSON_SERIALIZE_ENUM(BasisConfig::Family, {{BasisConfig::Family::Polynomial, "polynomial"},
                                                   {BasisConfig::Family::Bspline, "bspline"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DiffKind, {{DiffKind::Structural, "structural"},
                                        {DiffKind::Functional, "functional"}})

// JSON bindings. from_json fills absent keys from the default-constructed
// value; fields listed as required in the CLI docs use .at() and so surface
// a "key not found" error naming the field.
void to_json(nlohmann::json& j, const NoiseSpec& v);
void from_json(const nlohmann::json& j, NoiseSpec& v);
void to_json(nlohmann::json& j, const GraphSpec& v);
void from_json(const nlohmann::json& j, GraphSpec& v);  // requires "d"
void to_json(nlohmann::json& j, const ScenarioTemplate& v);
void from_json(const nlohmann::json& j, ScenarioTemplate& v);  // requires "graph"
void to_json(nlohmann::json& j, const Dag& v);
void from_json(const nlohmann::json& j, Dag& v);
void to_json(nlohmann::json& j, const TopologicalOrder& v);
void from_json(const nlohmann::json& j, TopologicalOrder& v);
void to_json(nlohmann::json& j, const KernelConfig& v);
void from_json(const nlohmann::json& j, KernelConfig& v);
void to_json(nlohmann::json& j, const DetectConfig& v);
void from_json(const nlohmann::json& j, DetectConfig& v);
void to_json(nlohmann::json& j, const BasisConfig& v);
void from_json(const nlohmann::json& j, BasisConfig& v);
void to_json(nlohmann::json& j, const IterationRecord& v);
void from_json(const nlohmann::json& j, IterationRecord& v);
void to_json(nlohmann::json& j, const ShiftReport& v);
void from_json(const nlohmann::json& j, ShiftReport& v);
void to_json(nlohmann::json& j, const GroundTruth& v);
void from_json(const nlohmann::json& j, GroundTruth& v);
void to_json(nlohmann::json& j, const EdgeTest& v);
void from_json(const nlohmann::json& j, EdgeTest& v);
void to_json(nlohmann::json& j, const DiffEdges& v);
void from_json(const nlohmann::json& j, DiffEdges& v);
void to_json(nlohmann::json& j, const Metrics& v);
void from_json(const nlohmann::json& j, Metrics& v);
void to_json(nlohmann::json& j, const Aggregate& v);
void to_json(nlohmann::json& j, const SeedRecord& v);
void to_json(nlohmann::json& j, const BenchCell& v);
void from_json(const nlohmann::json& j, BenchCell& v);  // requires "scenario"
void to_json(nlohmann::json& j, const BenchmarkResult& v);

}  // namespace iscan
