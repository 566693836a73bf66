#include "mgbary/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mgbary {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "file-not-found";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kInvalidGraph: return "invalid-graph";
    case ErrorCode::kInvalidMeasure: return "invalid-measure";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNonMinimizingEdge: return "non-minimizing-edge";
    case ErrorCode::kSupportCapExceeded: return "support-cap-exceeded";
    case ErrorCode::kSolverError: return "solver-error";
  }
  return "unknown";
}

namespace io {

namespace {

constexpr double kInputMassSlack = 1e-9;

[[noreturn]] void parse_fail(const std::string& detail) { throw Error(ErrorCode::kParseError, detail); }

const Json& field(const Json& j, const char* key, const char* context) {
  if (!j.is_object()) parse_fail(std::string(context) + " must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(std::string(context) + " is missing \"" + key + "\"");
  return *it;
}

double number_field(const Json& j, const char* key, const char* context) {
  const Json& v = field(j, key, context);
  if (!v.is_number()) parse_fail(std::string(context) + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

std::string string_field(const Json& j, const char* key, const char* context) {
  const Json& v = field(j, key, context);
  if (!v.is_string()) parse_fail(std::string(context) + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

const Json& array_field(const Json& j, const char* key, const char* context, bool required = true) {
  static const Json kEmpty = Json::array();
  if (!required && (!j.is_object() || !j.contains(key))) return kEmpty;
  const Json& v = field(j, key, context);
  if (!v.is_array()) parse_fail(std::string(context) + ": \"" + key + "\" must be an array");
  return v;
}

EdgeIndex edge_by_id(const MetricGraph& g, const std::string& id) {
  auto e = g.find_edge(id);
  if (!e) throw Error(ErrorCode::kInvalidMeasure, "unknown edge '" + id + "'");
  return *e;
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail("'" + path.string() + "': " + e.what());
  }
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", round12(x));
  return buf;
}

std::string dump(const Json& j) { return j.dump(2); }

GraphDescription parse_graph_description(const Json& j) {
  GraphDescription d;
  for (const Json& v : array_field(j, "vertices", "graph")) {
    if (!v.is_string()) parse_fail("graph: vertex ids must be strings");
    d.vertices.push_back(v.get<std::string>());
  }
  for (const Json& e : array_field(j, "edges", "graph"))
    d.edges.push_back({string_field(e, "id", "edge"), string_field(e, "u", "edge"), string_field(e, "v", "edge"),
                       number_field(e, "length", "edge")});
  return d;
}

MetricGraph parse_graph(const Json& j) { return build_graph(parse_graph_description(j)); }

GraphPoint parse_point(const MetricGraph& g, const std::string& literal) {
  const auto colon = literal.rfind(':');
  if (colon == std::string::npos) parse_fail("point literal '" + literal + "' has no ':'");
  const std::string head = literal.substr(0, colon);
  const std::string tail = literal.substr(colon + 1);
  if (head == "v") {
    auto v = g.find_vertex(tail);
    if (!v) throw Error(ErrorCode::kInvalidArgument, "unknown vertex '" + tail + "'");
    return g.vertex_point(*v);
  }
  auto e = g.find_edge(head);
  if (!e) throw Error(ErrorCode::kInvalidArgument, "unknown edge '" + head + "'");
  char* end = nullptr;
  const double offset = std::strtod(tail.c_str(), &end);
  if (tail.empty() || *end != '\0') parse_fail("bad offset in point literal '" + literal + "'");
  return g.edge_point(*e, offset);
}

std::string format_point(const MetricGraph& g, const GraphPoint& p) {
  if (p.is_vertex()) return "v:" + g.vertex_name(p.vertex_index());
  return g.edge(p.edge_index()).id + ":" + format_number(p.offset());
}

GraphMeasure parse_graph_measure(const MetricGraph& g, const Json& j) {
  std::vector<PointMass> atoms;
  std::vector<EdgePiece> pieces;
  double total = 0.0;
  for (const Json& a : array_field(j, "atoms", "measure", false)) {
    const std::string lit = string_field(a, "point", "atom");
    GraphPoint p;
    try {
      p = parse_point(g, lit);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidMeasure, e.what());
    }
    atoms.push_back({p, number_field(a, "mass", "atom")});
    total += atoms.back().mass;
  }
  for (const Json& p : array_field(j, "pieces", "measure", false)) {
    pieces.push_back({edge_by_id(g, string_field(p, "edge", "piece")), number_field(p, "a", "piece"),
                      number_field(p, "b", "piece"), number_field(p, "density", "piece")});
    total += pieces.back().density * (pieces.back().b - pieces.back().a);
  }
  if (std::abs(total - 1.0) <= kInputMassSlack && total > 0.0) {
    for (auto& a : atoms) a.mass /= total;
    for (auto& p : pieces) p.density /= total;
  }
  return GraphMeasure::from_parts(g, std::move(atoms), std::move(pieces));
}

Json to_json(const MetricGraph& g, const GraphMeasure& m) {
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) atoms.push_back({{"point", format_point(g, a.point)}, {"mass", round12(a.mass)}});
  Json pieces = Json::array();
  for (const auto& p : m.pieces())
    pieces.push_back({{"edge", g.edge(p.edge).id},
                      {"a", round12(p.a)},
                      {"b", round12(p.b)},
                      {"density", round12(p.density)}});
  return {{"atoms", atoms}, {"pieces", pieces}};
}

Json to_json(const MetricGraph& g, const DiscreteMeasure& m) {
  Json atoms = Json::array();
  for (const auto& a : m.support()) atoms.push_back({{"point", format_point(g, a.point)}, {"mass", round12(a.mass)}});
  return {{"atoms", atoms}, {"pieces", Json::array()}};
}

Json to_json(const MetricGraph& g, const TransportPlan& plan) {
  Json out = Json::array();
  for (const auto& e : plan.entries)
    out.push_back({{"source", format_point(g, e.source)},
                   {"target", format_point(g, e.target)},
                   {"mass", round12(e.mass)}});
  return out;
}

LineMeasure parse_line_measure(const Json& j) {
  std::vector<LineAtom> atoms;
  std::vector<DensityPiece> pieces;
  double total = 0.0;
  for (const Json& a : array_field(j, "atoms", "line measure", false)) {
    atoms.push_back({number_field(a, "x", "atom"), number_field(a, "mass", "atom")});
    total += atoms.back().mass;
  }
  for (const Json& p : array_field(j, "pieces", "line measure", false)) {
    pieces.push_back({number_field(p, "a", "piece"), number_field(p, "b", "piece"), number_field(p, "density", "piece")});
    total += pieces.back().density * (pieces.back().b - pieces.back().a);
  }
  if (std::abs(total - 1.0) <= kInputMassSlack && total > 0.0) {
    for (auto& a : atoms) a.mass /= total;
    for (auto& p : pieces) p.density /= total;
  }
  return LineMeasure::from_parts(std::move(atoms), std::move(pieces));
}

Json to_json(const LineMeasure& m) {
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) atoms.push_back({{"x", round12(a.x)}, {"mass", round12(a.mass)}});
  Json pieces = Json::array();
  for (const auto& p : m.pieces())
    pieces.push_back({{"a", round12(p.a)}, {"b", round12(p.b)}, {"density", round12(p.density)}});
  return {{"atoms", atoms}, {"pieces", pieces}};
}

ProblemSpec parse_problem(const Json& j, const std::filesystem::path& base_dir) {
  const Json& graph_field = field(j, "graph", "problem");
  MetricGraph g = graph_field.is_string() ? parse_graph(read_json_file(base_dir / graph_field.get<std::string>()))
                                          : parse_graph(graph_field);
  std::vector<double> weights;
  std::vector<GraphMeasure> measures;
  for (const Json& m : array_field(j, "measures", "problem")) {
    weights.push_back(number_field(m, "weight", "problem measure"));
    measures.push_back(parse_graph_measure(g, field(m, "measure", "problem measure")));
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) <= kInputMassSlack && total > 0.0)
    for (double& w : weights) w /= total;

  ProblemSpec spec{std::move(g), {}, 0.0};
  for (std::size_t i = 0; i < weights.size(); ++i) spec.measures.push_back({weights[i], std::move(measures[i])});
  if (j.contains("grid")) spec.grid = number_field(j, "grid", "problem");
  return spec;
}

std::string cell_masses_csv(const MetricGraph& g, const DiscreteMeasure& m) {
  std::string out = "kind,id,offset,mass\n";
  for (const auto& pm : m.support()) {
    if (pm.point.is_vertex())
      out += "vertex," + g.vertex_name(pm.point.vertex_index()) + ",,";
    else
      out += "edge," + g.edge(pm.point.edge_index()).id + "," + format_number(pm.point.offset()) + ",";
    out += format_number(pm.mass) + "\n";
  }
  return out;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kHypothesisNotMet: return "HYPOTHESIS_NOT_MET";
  }
  return "FAIL";
}

Json to_json(const MetricGraph& g, const RegularityReport& r) {
  auto atoms = [&](const std::vector<PointMass>& list) {
    Json out = Json::array();
    for (const auto& pm : list) out.push_back({{"point", format_point(g, pm.point)}, {"mass", round12(pm.mass)}});
    return out;
  };
  return {{"verdict", verdict_name(r.verdict)},
          {"interior_atoms", atoms(r.interior_atoms)},
          {"vertex_atoms", atoms(r.vertex_atoms)},
          {"max_interior_mass", round12(r.max_interior_mass)},
          {"max_interior_density", round12(r.max_interior_density)},
          {"ac_ceiling", round12(r.ceiling)},
          {"atom_tol", round12(r.atom_tol)},
          {"atomless_weight", round12(r.atomless_weight)}};
}

}  // namespace io
}  // namespace mgbary
