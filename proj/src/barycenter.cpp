#include "mgbary/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "mgbary/simplex.hpp"

namespace mgbary {

BarycenterProblem::BarycenterProblem(const MetricGraph& g, std::vector<WeightedGraphMeasure> measures, double grid)
    : graph_(&g), measures_(std::move(measures)), grid_(grid) {
  if (measures_.empty()) throw Error(ErrorCode::kInvalidArgument, "barycenter problem has no measures");
  if (!(grid_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid spacing must be positive");
  double total = 0.0;
  for (const auto& wm : measures_) {
    if (!(wm.weight > 0.0)) throw Error(ErrorCode::kInvalidArgument, "barycenter weights must be positive");
    total += wm.weight;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw Error(ErrorCode::kInvalidArgument, "barycenter weights must sum to 1");
  for (const auto& wm : measures_) discrete_.push_back(discretize(g, wm.measure, grid_));
}

double BarycenterProblem::atomless_weight() const {
  double w = 0.0;
  for (const auto& wm : measures_)
    if (wm.measure.is_atomless()) w += wm.weight;
  return w;
}

double BarycenterProblem::max_input_density() const {
  double best = 0.0;
  for (const auto& wm : measures_) best = std::max(best, wm.measure.max_density());
  return best;
}

double objective(const BarycenterProblem& problem, const DiscreteMeasure& mu) {
  double total = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i)
    total += problem.weight(i) * w2_graph(problem.graph(), mu, problem.discretized(i)).cost;
  return total;
}

std::vector<GraphPoint> candidate_support(const BarycenterProblem& problem) {
  const MetricGraph& g = problem.graph();
  std::vector<GraphPoint> pts;
  for (VertexIndex v = 0; v < g.num_vertices(); ++v) pts.push_back(g.vertex_point(v));
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const double l = g.edge(e).length;
    const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(l / problem.grid() - 1e-9)));
    for (std::size_t k = 1; k < cells; ++k)
      pts.push_back(g.edge_point(e, l * static_cast<double>(k) / static_cast<double>(cells)));
  }
  for (std::size_t i = 0; i < problem.size(); ++i)
    for (const auto& pm : problem.discretized(i).support()) pts.push_back(pm.point);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

LpBarycenter solve_lp(const BarycenterProblem& problem, const LpOptions& options) {
  const MetricGraph& g = problem.graph();
  std::vector<GraphPoint> support = candidate_support(problem);
  support.insert(support.end(), options.extra_support.begin(), options.extra_support.end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.size() > options.support_cap)
    throw Error(ErrorCode::kSupportCapExceeded, "candidate support has " + std::to_string(support.size()) +
                                                    " points, above the cap of " + std::to_string(options.support_cap));

  const std::size_t nx = support.size();
  const std::size_t k = problem.size();
  // Rows: for each measure i, one row per candidate x (first marginal minus mu)
  // followed by one row per support point y of nu_i (second marginal).
  std::vector<std::size_t> first_row(k);
  std::vector<std::size_t> second_row(k);
  std::size_t rows = 0;
  for (std::size_t i = 0; i < k; ++i) {
    first_row[i] = rows;
    rows += nx;
    second_row[i] = rows;
    rows += problem.discretized(i).size();
  }

  lp::LinearProgram program(rows);
  std::vector<lp::Entry> column;
  for (std::size_t x = 0; x < nx; ++x) {
    column.clear();
    for (std::size_t i = 0; i < k; ++i) column.push_back({first_row[i] + x, -1.0});
    program.add_column(0.0, column);
  }
  for (std::size_t i = 0; i < k; ++i) {
    const auto& target = problem.discretized(i).support();
    for (std::size_t y = 0; y < target.size(); ++y) program.set_rhs(second_row[i] + y, target[y].mass);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < target.size(); ++y) {
        const double d = g.distance(support[x], target[y].point);
        const lp::Entry entries[] = {{first_row[i] + x, 1.0}, {second_row[i] + y, 1.0}};
        program.add_column(problem.weight(i) * d * d, entries);
      }
  }

  const lp::LpResult res = lp::solve(program);
  if (res.status != lp::LpStatus::kOptimal)
    throw Error(ErrorCode::kSolverError, "barycenter LP did not reach optimality");

  std::vector<PointMass> mu;
  for (std::size_t x = 0; x < nx; ++x)
    if (res.x[x] > 1e-14) mu.push_back({support[x], res.x[x]});
  LpBarycenter out{DiscreteMeasure::normalized(std::move(mu)), res.objective, nx, res.iterations};
  return out;
}

QuantileFn clamp_quantile(const QuantileFn& q, double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorCode::kInvalidArgument, "clamp_quantile requires lo < hi");
  std::vector<QuantileKnot> out;
  auto emit = [&](double t, double value, double slope) {
    if (!out.empty() && t <= out.back().t) return;
    out.push_back({t, value, slope});
  };
  const auto& knots = q.knots();
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const double t0 = knots[k].t;
    const double t1 = q.segment_end(k);
    const double v0 = knots[k].value;
    const double s = knots[k].slope;
    if (s == 0.0) {
      emit(t0, std::clamp(v0, lo, hi), 0.0);
      continue;
    }
    // Times at which the segment crosses lo and hi.
    const double t_lo = t0 + (lo - v0) / s;
    const double t_hi = t0 + (hi - v0) / s;
    if (t_lo > t0) emit(t0, lo, 0.0);
    const double a = std::max(t0, t_lo);
    const double b = std::min(t1, t_hi);
    if (a < b) emit(a, std::clamp(v0 + s * (a - t0), lo, hi), s);
    const double c = std::max(t0, t_hi);
    if (c < t1) emit(c, hi, 0.0);
  }
  return QuantileFn::from_knots(std::move(out));
}

DiscreteMeasure fixed_point_step(const BarycenterProblem& problem, const CoverContext& ctx, unsigned threads) {
  std::vector<WeightedLineMeasure> unfolded(problem.size());
  auto work = [&](std::size_t i) { unfolded[i] = {problem.weight(i), phi(ctx, problem.discretized(i))}; };
  if (threads <= 1) {
    for (std::size_t i = 0; i < problem.size(); ++i) work(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned t = 0; t < threads; ++t)
      jobs.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t i = t; i < problem.size(); i += threads) work(i);
      }));
    for (auto& j : jobs) j.get();
  }
  const QuantileFn clamped = clamp_quantile(average_quantile(unfolded), 0.0, ctx.edge_length());
  return line_to_edge(ctx, measure_from_quantile(clamped), problem.grid());
}

FixedPointResult solve_edge_fixed_point(const BarycenterProblem& problem, const OrientedEdge& e,
                                        const FixedPointOptions& options) {
  const MetricGraph& g = problem.graph();
  if (e.edge >= g.num_edges()) throw Error(ErrorCode::kInvalidArgument, "unknown edge");
  if (!g.is_edge_minimizing(e.edge))
    throw Error(ErrorCode::kNonMinimizingEdge, "edge '" + g.edge(e.edge).id + "' is not minimizing");
  const double l = g.edge(e.edge).length;
  const double eps = options.eps.value_or(1e-6 * l);

  DiscreteMeasure mu;
  if (options.start_at_tail) {
    mu = DiscreteMeasure::dirac(g.vertex_point(g.tail(e)));
  } else {
    const GraphMeasure uniform = GraphMeasure::from_parts(g, {}, {{e.edge, 0.0, l, 1.0 / l}});
    mu = discretize(g, uniform, problem.grid());
  }

  FixedPointResult result;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    const CoverContext ctx(g, e, mu);
    DiscreteMeasure next = fixed_point_step(problem, ctx, options.threads);
    result.last_step = w2_line(edge_to_line(ctx, mu), edge_to_line(ctx, next));
    result.iterations = it + 1;
    mu = std::move(next);
    if (result.last_step <= eps) {
      result.converged = true;
      break;
    }
  }
  result.mu = mu;
  result.objective = objective(problem, mu);
  return result;
}

RegularityReport regularity_report(const BarycenterProblem& problem, const DiscreteMeasure& mu,
                                   std::optional<double> atom_tol) {
  RegularityReport r;
  r.atomless_weight = problem.atomless_weight();
  if (r.atomless_weight > 0.0) r.ceiling = problem.grid() * problem.max_input_density() / r.atomless_weight;
  r.atom_tol = atom_tol.value_or(5.0 * r.ceiling);

  for (const auto& pm : mu.support()) {
    if (pm.point.is_vertex()) {
      r.vertex_atoms.push_back(pm);
      continue;
    }
    r.max_interior_mass = std::max(r.max_interior_mass, pm.mass);
    if (pm.mass > r.atom_tol) r.interior_atoms.push_back(pm);
  }
  r.max_interior_density = r.max_interior_mass / problem.grid();
  if (r.atomless_weight <= 0.0)
    r.verdict = Verdict::kHypothesisNotMet;
  else
    r.verdict = r.interior_atoms.empty() ? Verdict::kPass : Verdict::kFail;
  return r;
}

}  // namespace mgbary
