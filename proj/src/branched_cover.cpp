#include "mgbary/branched_cover.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

namespace mgbary {

namespace {

constexpr double kLevelTolerance = 1e-9;

// Base vertex of the distance map for a tag.
VertexIndex base_vertex(const CoverContext& ctx, BranchClass tag) {
  return tag == BranchClass::kPlus ? ctx.graph().head(ctx.edge()) : ctx.graph().tail(ctx.edge());
}

// h(y) = shift + sign * d(base, y).
struct AffineDistance {
  double shift;
  double sign;
};

AffineDistance affine_of(const CoverContext& ctx, BranchClass tag) {
  switch (tag) {
    case BranchClass::kE: return {0.0, 1.0};
    case BranchClass::kPlus: return {ctx.edge_length(), 1.0};
    case BranchClass::kMinus: return {0.0, -1.0};
  }
  return {0.0, 1.0};
}

bool in_domain(const CoverContext& ctx, BranchClass tag, EdgeIndex f) {
  return (tag == BranchClass::kE) == (f == ctx.edge().edge);
}

bool vertex_in_domain(const CoverContext& ctx, BranchClass tag, VertexIndex v) {
  const bool on_e = v == ctx.graph().tail(ctx.edge()) || v == ctx.graph().head(ctx.edge());
  return tag == BranchClass::kE ? on_e : !on_e;
}

}  // namespace

CoverContext::CoverContext(const MetricGraph& g, OrientedEdge e, DiscreteMeasure base)
    : graph_(&g), edge_(e), base_(std::move(base)) {
  if (e.edge >= g.num_edges()) throw Error(ErrorCode::kInvalidArgument, "unknown base edge");
  if (!g.is_edge_minimizing(e.edge))
    throw Error(ErrorCode::kNonMinimizingEdge, "edge '" + g.edge(e.edge).id + "' is not minimizing");
  for (const auto& pm : base_.support())
    if (!g.on_edge(pm.point, e.edge))
      throw Error(ErrorCode::kInvalidArgument, "base measure has mass off edge '" + g.edge(e.edge).id + "'");
}

double h_eval(const CoverContext& ctx, BranchClass tag, const GraphPoint& y) {
  const AffineDistance h = affine_of(ctx, tag);
  return h.shift + h.sign * ctx.graph().distance(ctx.graph().vertex_point(base_vertex(ctx, tag)), y);
}

PhiParts phi_parts(const CoverContext& ctx, const DiscreteMeasure& nu) {
  const MetricGraph& g = ctx.graph();
  const W2Result opt = w2_graph(g, ctx.base(), nu);
  const DecomposedPlan parts = decompose_plan(g, ctx.edge(), opt.plan);

  // Targets reached through a single class keep their exact mass in nu;
  // only targets split between classes fall back to the plan's flow masses.
  std::map<GraphPoint, unsigned> classes;
  const std::pair<const TransportPlan*, BranchClass> groups[] = {
      {&parts.e, BranchClass::kE}, {&parts.plus, BranchClass::kPlus}, {&parts.minus, BranchClass::kMinus}};
  for (const auto& [plan, tag] : groups)
    for (const auto& entry : plan->entries) classes[entry.target] |= 1u << static_cast<unsigned>(tag);

  PhiParts out;
  bool split = false;
  auto push = [&](const TransportPlan& plan, BranchClass tag, std::vector<LineAtom>& dst) {
    std::map<GraphPoint, double> flow;
    for (const auto& entry : plan.entries) flow[entry.target] += entry.mass;
    for (const auto& [y, m] : flow) {
      const bool single = std::has_single_bit(classes[y]);
      split = split || !single;
      dst.push_back({h_eval(ctx, tag, y), single ? nu.mass_at(y) : m});
    }
  };
  push(parts.e, BranchClass::kE, out.e);
  push(parts.plus, BranchClass::kPlus, out.plus);
  push(parts.minus, BranchClass::kMinus, out.minus);

  std::vector<LineAtom> all;
  all.insert(all.end(), out.e.begin(), out.e.end());
  all.insert(all.end(), out.plus.begin(), out.plus.end());
  all.insert(all.end(), out.minus.begin(), out.minus.end());
  if (split) {
    double mass = 0.0;
    for (const auto& a : all) mass += a.mass;
    for (auto& a : all) a.mass /= mass;
  }
  out.measure = LineMeasure::from_parts(std::move(all), {});
  return out;
}

LineMeasure phi(const CoverContext& ctx, const DiscreteMeasure& nu) { return phi_parts(ctx, nu).measure; }

LineMeasure edge_to_line(const CoverContext& ctx, const DiscreteMeasure& mu) {
  std::vector<LineAtom> atoms;
  for (const auto& pm : mu.support()) {
    if (!ctx.graph().on_edge(pm.point, ctx.edge().edge))
      throw Error(ErrorCode::kInvalidArgument, "measure has mass off the base edge");
    atoms.push_back({ctx.graph().offset_on(pm.point, ctx.edge()), pm.mass});
  }
  return LineMeasure::from_parts(std::move(atoms), {});
}

DiscreteMeasure line_to_edge(const CoverContext& ctx, const LineMeasure& m, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid spacing must be positive");
  const double l = ctx.edge_length();
  std::vector<PointMass> out;
  auto point_at = [&](double s) {
    if (s < -kSnapTolerance || s > l + kSnapTolerance)
      throw Error(ErrorCode::kInvalidArgument, "line measure leaves [0, l(e)]");
    return ctx.graph().oriented_point(ctx.edge(), std::clamp(s, 0.0, l));
  };
  for (const auto& a : m.atoms()) out.push_back({point_at(a.x), a.mass});
  for (const auto& p : m.pieces()) {
    const double width = p.b - p.a;
    const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(width / h - 1e-9)));
    const double cell = width / static_cast<double>(cells);
    for (std::size_t k = 0; k < cells; ++k)
      out.push_back({point_at(p.a + (static_cast<double>(k) + 0.5) * cell), p.density * cell});
  }
  return DiscreteMeasure::normalized(std::move(out));
}

std::vector<DensityPiece> push_forward_piece(const CoverContext& ctx, BranchClass tag, const EdgePiece& piece) {
  const MetricGraph& g = ctx.graph();
  const Edge& f = g.edge(piece.edge);
  const VertexIndex base = base_vertex(ctx, tag);
  const double da = g.vertex_distance(base, f.u);
  const double db = g.vertex_distance(base, f.v);
  const double cut = std::clamp(0.5 * (db + f.length - da), 0.0, f.length);
  const AffineDistance h = affine_of(ctx, tag);

  std::vector<DensityPiece> out;
  auto emit = [&](double d0, double d1) {
    double x0 = h.shift + h.sign * d0;
    double x1 = h.shift + h.sign * d1;
    if (x0 > x1) std::swap(x0, x1);
    if (x1 > x0) out.push_back({x0, x1, piece.density});
  };
  // Reached through u before the cut point, through v after it.
  if (piece.a < cut) {
    const double hi = std::min(piece.b, cut);
    emit(da + piece.a, da + hi);
  }
  if (piece.b > cut) {
    const double lo = std::max(piece.a, cut);
    emit(db + f.length - lo, db + f.length - piece.b);
  }
  std::sort(out.begin(), out.end(), [](const DensityPiece& x, const DensityPiece& y) { return x.a < y.a; });
  return out;
}

std::vector<double> exceptional_values(const CoverContext& ctx, BranchClass tag) {
  const MetricGraph& g = ctx.graph();
  const VertexIndex base = base_vertex(ctx, tag);
  const AffineDistance h = affine_of(ctx, tag);
  std::vector<double> out;
  for (VertexIndex v = 0; v < g.num_vertices(); ++v)
    if (vertex_in_domain(ctx, tag, v) || tag != BranchClass::kE)
      out.push_back(h.shift + h.sign * g.vertex_distance(base, v));
  for (const GraphPoint& c : g.cut_points_from(base))
    if (in_domain(ctx, tag, c.edge_index()))
      out.push_back(h.shift + h.sign * g.distance(g.vertex_point(base), c));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) <= kLevelTolerance; }),
            out.end());
  return out;
}

std::size_t preimage_count(const CoverContext& ctx, BranchClass tag, double value) {
  for (double x : exceptional_values(ctx, tag))
    if (std::abs(x - value) <= kLevelTolerance)
      throw Error(ErrorCode::kInvalidArgument, "preimage_count queried at an exceptional value");

  const MetricGraph& g = ctx.graph();
  const VertexIndex base = base_vertex(ctx, tag);
  const AffineDistance h = affine_of(ctx, tag);
  const double level = (value - h.shift) * h.sign;  // required distance from base
  std::size_t count = 0;
  for (EdgeIndex fi = 0; fi < g.num_edges(); ++fi) {
    if (!in_domain(ctx, tag, fi)) continue;
    const Edge& f = g.edge(fi);
    const double da = g.vertex_distance(base, f.u);
    const double db = g.vertex_distance(base, f.v);
    const double cut = 0.5 * (db + f.length - da);
    const double rising = level - da;              // solution reached through u
    const double falling = f.length - (level - db);  // solution reached through v
    if (rising > 0.0 && rising < std::min(f.length, cut)) ++count;
    if (falling > std::max(0.0, cut) && falling < f.length) ++count;
  }
  // Vertices are exceptional, so no vertex can sit on the level set.
  return count;
}

std::vector<LiftedPlanEntry> lift_line_plan(const CoverContext& ctx, BranchClass tag,
                                            std::span<const LinePlanEntry> plan, const DiscreteMeasure& nu) {
  struct Image {
    double value;
    GraphPoint point;
    double mass;
  };
  std::vector<Image> images;
  for (const auto& pm : nu.support()) {
    const bool inside = pm.point.is_vertex() ? vertex_in_domain(ctx, tag, pm.point.vertex_index())
                                              : in_domain(ctx, tag, pm.point.edge_index());
    if (inside) images.push_back({h_eval(ctx, tag, pm.point), pm.point, pm.mass});
  }

  std::vector<LiftedPlanEntry> out;
  for (const auto& entry : plan) {
    if (entry.mass <= 0.0) continue;
    double weight = 0.0;
    for (const auto& im : images)
      if (std::abs(im.value - entry.target) <= kLevelTolerance) weight += im.mass;
    if (weight <= 0.0)
      throw Error(ErrorCode::kInvalidArgument, "plan target has no preimage in the support of the measure");
    for (const auto& im : images)
      if (std::abs(im.value - entry.target) <= kLevelTolerance)
        out.push_back({entry.source, im.point, entry.mass * im.mass / weight});
  }
  return out;
}

}  // namespace mgbary
