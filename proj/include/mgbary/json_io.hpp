#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgbary/barycenter.hpp"
#include "mgbary/line_ot.hpp"
#include "mgbary/metric_graph.hpp"
#include "mgbary/ot_core.hpp"

namespace mgbary::io {

using Json = nlohmann::ordered_json;

// Reads and parses a JSON file. Throws Error(kFileNotFound) or
// Error(kParseError).
Json read_json_file(const std::filesystem::path& path);

// Rounds to 12 significant digits so printed numbers are stable.
double round12(double x);
std::string format_number(double x);

// Compact serialization with keys in insertion order.
std::string dump(const Json& j);

GraphDescription parse_graph_description(const Json& j);
MetricGraph parse_graph(const Json& j);

// "v:<vertex>" or "<edge>:<offset from u>".
GraphPoint parse_point(const MetricGraph& g, const std::string& literal);
std::string format_point(const MetricGraph& g, const GraphPoint& p);

// Total mass within 1e-9 of one is accepted and rescaled to exactly one.
GraphMeasure parse_graph_measure(const MetricGraph& g, const Json& j);
Json to_json(const MetricGraph& g, const GraphMeasure& m);
Json to_json(const MetricGraph& g, const DiscreteMeasure& m);
Json to_json(const MetricGraph& g, const TransportPlan& plan);

LineMeasure parse_line_measure(const Json& j);
Json to_json(const LineMeasure& m);

struct ProblemSpec {
  MetricGraph graph;
  std::vector<WeightedGraphMeasure> measures;
  double grid = 0.0;
};

// "graph" may be an inline object or a path relative to base_dir. Weights
// within 1e-9 of summing to one are rescaled.
ProblemSpec parse_problem(const Json& j, const std::filesystem::path& base_dir);

// One row per support point: kind,id,offset,mass.
std::string cell_masses_csv(const MetricGraph& g, const DiscreteMeasure& m);

Json to_json(const MetricGraph& g, const RegularityReport& r);
std::string verdict_name(Verdict v);

}  // namespace mgbary::io
