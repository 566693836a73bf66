#include "mgbary/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "mgbary/barycenter.hpp"
#include "mgbary/branched_cover.hpp"
#include "mgbary/json_io.hpp"

namespace mgbary::cli {

namespace {

using io::Json;

struct Options {
  std::string graph;
  std::string from;
  std::string to;
  std::string edge;
  bool reverse = false;
  std::string base;
  std::string measure;
  std::string problem;
  std::optional<double> grid;
  std::string method = "lp";
  std::size_t max_iter = 200;
  std::optional<double> eps;
  bool start_at_tail = false;
  std::optional<double> atom_tol;
  std::string barycenter;
  std::string csv;
  unsigned threads = 1;
  std::string output;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kFileNotFound, "cannot write '" + path + "'");
  f << text;
}

std::size_t support_cap() {
  LpOptions defaults;
  const char* env = std::getenv("MGBARY_SUPPORT_CAP");
  if (env == nullptr || *env == '\0') return defaults.support_cap;
  char* end = nullptr;
  const unsigned long long cap = std::strtoull(env, &end, 10);
  if (*end != '\0' || cap == 0) throw Error(ErrorCode::kInvalidArgument, "MGBARY_SUPPORT_CAP must be a positive integer");
  return static_cast<std::size_t>(cap);
}

double require_grid(const std::optional<double>& grid) {
  if (!grid || !(*grid > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--grid must be a positive number");
  return *grid;
}

OrientedEdge oriented_edge(const MetricGraph& g, const Options& o) {
  auto e = g.find_edge(o.edge);
  if (!e) throw Error(ErrorCode::kInvalidArgument, "unknown edge '" + o.edge + "'");
  return {*e, o.reverse};
}

DiscreteMeasure load_discrete(const MetricGraph& g, const std::string& path, double grid) {
  Json j = io::read_json_file(path);
  // Accept the output of `bary` directly.
  if (j.is_object() && j.contains("barycenter")) j = j["barycenter"];
  return discretize(g, io::parse_graph_measure(g, j), grid);
}

std::string cmd_validate(const Options& o) {
  const MetricGraph g = io::parse_graph(io::read_json_file(o.graph));
  Json out = {{"valid", true},
              {"c", io::round12(g.min_edge_length())},
              {"vertices", g.num_vertices()},
              {"edges", g.num_edges()},
              {"all_edges_minimizing", g.all_edges_minimizing()}};
  return io::dump(out) + "\n";
}

std::string cmd_dist(const Options& o) {
  const MetricGraph g = io::parse_graph(io::read_json_file(o.graph));
  return io::format_number(g.distance(io::parse_point(g, o.from), io::parse_point(g, o.to))) + "\n";
}

std::string cmd_w2(const Options& o) {
  const MetricGraph g = io::parse_graph(io::read_json_file(o.graph));
  const double h = o.grid.value_or(0.01);
  const W2Result r = w2_graph(g, load_discrete(g, o.from, h), load_discrete(g, o.to, h));
  Json out = {{"w2", io::round12(r.distance())}, {"cost", io::round12(r.cost)}, {"plan", io::to_json(g, r.plan)}};
  return io::dump(out) + "\n";
}

std::string cmd_phi(const Options& o) {
  const MetricGraph g = io::parse_graph(io::read_json_file(o.graph));
  const double h = o.grid.value_or(0.01);
  const CoverContext ctx(g, oriented_edge(g, o), load_discrete(g, o.base, h));
  return io::dump(io::to_json(phi(ctx, load_discrete(g, o.measure, h)))) + "\n";
}

io::ProblemSpec load_problem(const Options& o) {
  io::ProblemSpec spec = io::parse_problem(io::read_json_file(o.problem),
                                           std::filesystem::path(o.problem).parent_path());
  if (o.grid) spec.grid = *o.grid;
  require_grid(spec.grid);
  return spec;
}

std::string cmd_bary(const Options& o) {
  const io::ProblemSpec spec = load_problem(o);
  const BarycenterProblem problem(spec.graph, spec.measures, spec.grid);
  const MetricGraph& g = spec.graph;

  Json out = {{"method", o.method}, {"grid", io::round12(spec.grid)}};
  DiscreteMeasure mu;
  if (o.method == "lp") {
    LpOptions opts;
    opts.support_cap = support_cap();
    const LpBarycenter r = solve_lp(problem, opts);
    mu = r.mu;
    out["objective"] = io::round12(r.objective);
    out["candidates"] = r.candidates;
  } else if (o.method == "fixed-point") {
    if (o.edge.empty()) throw Error(ErrorCode::kInvalidArgument, "--edge is required for the fixed-point method");
    FixedPointOptions opts;
    opts.max_iter = o.max_iter;
    opts.eps = o.eps;
    opts.start_at_tail = o.start_at_tail;
    opts.threads = o.threads;
    const FixedPointResult r = solve_edge_fixed_point(problem, oriented_edge(g, o), opts);
    mu = r.mu;
    out["objective"] = io::round12(r.objective);
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    out["last_step"] = io::round12(r.last_step);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown method '" + o.method + "'");
  }

  Json vertex_mass = Json::object();
  for (const auto& pm : mu.support())
    if (pm.point.is_vertex()) vertex_mass[g.vertex_name(pm.point.vertex_index())] = io::round12(pm.mass);
  out["vertex_mass"] = vertex_mass;
  out["barycenter"] = io::to_json(g, mu);
  if (!o.csv.empty()) write_file(o.csv, io::cell_masses_csv(g, mu));
  return io::dump(out) + "\n";
}

std::string cmd_report(const Options& o) {
  const io::ProblemSpec spec = load_problem(o);
  const BarycenterProblem problem(spec.graph, spec.measures, spec.grid);
  const MetricGraph& g = spec.graph;
  DiscreteMeasure mu;
  if (!o.barycenter.empty()) {
    mu = load_discrete(g, o.barycenter, spec.grid);
  } else {
    LpOptions opts;
    opts.support_cap = support_cap();
    mu = solve_lp(problem, opts).mu;
  }
  const RegularityReport r = regularity_report(problem, mu, o.atom_tol);
  if (!o.csv.empty()) write_file(o.csv, io::cell_masses_csv(g, mu));
  return io::dump(io::to_json(g, r)) + "\n";
}

void error_object(std::ostream& err, std::string_view code, const std::string& detail) {
  Json e = {{"error", code}, {"detail", detail}};
  err << io::dump(e) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Wasserstein distances and barycenters on metric graphs", "mgbary"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "Worker threads for independent per-measure work")
        ->check(CLI::PositiveNumber);
    sub->add_option("--output", o.output, "Write the result here instead of stdout");
  };

  CLI::App* validate = app.add_subcommand("validate", "Check a graph file");
  validate->add_option("--graph", o.graph, "Graph JSON")->required();
  add_common(validate);

  CLI::App* dist = app.add_subcommand("dist", "Distance between two points");
  dist->add_option("--graph", o.graph, "Graph JSON")->required();
  dist->add_option("--from", o.from, "Point literal, v:<vertex> or <edge>:<offset>")->required();
  dist->add_option("--to", o.to, "Point literal")->required();
  add_common(dist);

  CLI::App* w2 = app.add_subcommand("w2", "Wasserstein-2 distance and optimal plan");
  w2->add_option("--graph", o.graph, "Graph JSON")->required();
  w2->add_option("--from", o.from, "Source measure JSON")->required();
  w2->add_option("--to", o.to, "Target measure JSON")->required();
  w2->add_option("--grid", o.grid, "Discretization spacing for densities (default 0.01)");
  add_common(w2);

  CLI::App* phi_cmd = app.add_subcommand("phi", "Unfold a measure onto the real line around an edge");
  phi_cmd->add_option("--graph", o.graph, "Graph JSON")->required();
  phi_cmd->add_option("--edge", o.edge, "Base edge id")->required();
  phi_cmd->add_flag("--reverse", o.reverse, "Orient the edge from v to u");
  phi_cmd->add_option("--base", o.base, "Base measure JSON, supported on the edge")->required();
  phi_cmd->add_option("--measure", o.measure, "Measure JSON to unfold")->required();
  phi_cmd->add_option("--grid", o.grid, "Discretization spacing for densities (default 0.01)");
  add_common(phi_cmd);

  CLI::App* bary = app.add_subcommand("bary", "Barycenter of a weighted family of measures");
  bary->add_option("--problem", o.problem, "Problem JSON")->required();
  bary->add_option("--grid", o.grid, "Grid spacing, overrides the problem file");
  bary->add_option("--method", o.method, "lp or fixed-point")->check(CLI::IsMember({"lp", "fixed-point"}));
  bary->add_option("--edge", o.edge, "Edge for the fixed-point method");
  bary->add_flag("--reverse", o.reverse, "Orient the edge from v to u");
  bary->add_option("--max-iter", o.max_iter, "Fixed-point iteration limit");
  bary->add_option("--eps", o.eps, "Fixed-point stopping threshold");
  bary->add_flag("--start-at-tail", o.start_at_tail, "Start the fixed point from a Dirac at the tail");
  bary->add_option("--csv", o.csv, "Also write per-cell masses as CSV");
  add_common(bary);

  CLI::App* report = app.add_subcommand("report", "Regularity report for a barycenter");
  report->add_option("--problem", o.problem, "Problem JSON")->required();
  report->add_option("--grid", o.grid, "Grid spacing, overrides the problem file");
  report->add_option("--barycenter", o.barycenter, "Barycenter JSON (default: solve the LP)");
  report->add_option("--atom-tol", o.atom_tol, "Interior atom threshold");
  report->add_option("--csv", o.csv, "Also write per-cell masses as CSV");
  add_common(report);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_object(err, error_code_name(ErrorCode::kInvalidArgument), e.what());
    return 1;
  }

  try {
    std::string text;
    if (validate->parsed()) text = cmd_validate(o);
    else if (dist->parsed()) text = cmd_dist(o);
    else if (w2->parsed()) text = cmd_w2(o);
    else if (phi_cmd->parsed()) text = cmd_phi(o);
    else if (bary->parsed()) text = cmd_bary(o);
    else text = cmd_report(o);
    if (o.output.empty())
      out << text;
    else
      write_file(o.output, text);
    return 0;
  } catch (const Error& e) {
    error_object(err, error_code_name(e.code()), e.what());
  } catch (const std::exception& e) {
    error_object(err, error_code_name(ErrorCode::kSolverError), e.what());
  }
  return 1;
}

}  // namespace mgbary::cli
