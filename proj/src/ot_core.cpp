#include "mgbary/ot_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mgbary/line_ot.hpp"
#include "mgbary/transport_solver.hpp"

namespace mgbary {

namespace {

std::vector<PointMass> aggregate(std::vector<PointMass> masses) {
  std::sort(masses.begin(), masses.end(), [](const PointMass& a, const PointMass& b) { return a.point < b.point; });
  std::vector<PointMass> out;
  for (const auto& pm : masses) {
    if (!out.empty() && out.back().point == pm.point)
      out.back().mass += pm.mass;
    else
      out.push_back(pm);
  }
  return out;
}

double total(std::span<const PointMass> masses) {
  double s = 0.0;
  for (const auto& pm : masses) s += pm.mass;
  return s;
}

// Largest discrepancy between two aggregated point-mass lists.
double marginal_residual(const std::vector<PointMass>& a, const std::vector<PointMass>& b) {
  std::map<GraphPoint, double> diff;
  for (const auto& pm : a) diff[pm.point] += pm.mass;
  for (const auto& pm : b) diff[pm.point] -= pm.mass;
  double worst = 0.0;
  for (const auto& [p, d] : diff) worst = std::max(worst, std::abs(d));
  return worst;
}

}  // namespace

GraphMeasure GraphMeasure::from_parts(const MetricGraph& g, std::vector<PointMass> atoms,
                                      std::vector<EdgePiece> pieces) {
  GraphMeasure m;
  double mass = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.mass) || a.mass < 0.0) throw Error(ErrorCode::kInvalidMeasure, "atom masses must be nonnegative");
    if (a.mass > 0.0) m.atoms_.push_back(a);
    mass += a.mass;
  }
  m.atoms_ = aggregate(std::move(m.atoms_));
  for (const auto& p : pieces) {
    if (p.edge >= g.num_edges()) throw Error(ErrorCode::kInvalidMeasure, "density piece on an unknown edge");
    const double l = g.edge(p.edge).length;
    if (!(p.a >= 0.0 && p.a <= p.b && p.b <= l) || !std::isfinite(p.density) || p.density < 0.0)
      throw Error(ErrorCode::kInvalidMeasure, "density piece outside [0, length] of edge '" + g.edge(p.edge).id + "'");
    if (p.density > 0.0 && p.b > p.a) m.pieces_.push_back(p);
    mass += p.density * (p.b - p.a);
  }
  std::sort(m.pieces_.begin(), m.pieces_.end(), [](const EdgePiece& x, const EdgePiece& y) {
    return x.edge != y.edge ? x.edge < y.edge : x.a < y.a;
  });
  for (std::size_t k = 1; k < m.pieces_.size(); ++k) {
    const auto& prev = m.pieces_[k - 1];
    const auto& cur = m.pieces_[k];
    if (prev.edge == cur.edge && prev.b > cur.a + kSnapTolerance)
      throw Error(ErrorCode::kInvalidMeasure, "density pieces overlap on edge '" + g.edge(cur.edge).id + "'");
  }
  if (std::abs(mass - 1.0) > kMassTolerance)
    throw Error(ErrorCode::kInvalidMeasure, "total mass " + std::to_string(mass) + " is not 1");
  return m;
}

double GraphMeasure::max_density() const {
  double best = 0.0;
  for (const auto& p : pieces_) best = std::max(best, p.density);
  return best;
}

DiscreteMeasure DiscreteMeasure::from_masses(std::vector<PointMass> masses) {
  for (const auto& pm : masses)
    if (!std::isfinite(pm.mass) || pm.mass < 0.0) throw Error(ErrorCode::kInvalidMeasure, "point masses must be nonnegative");
  std::erase_if(masses, [](const PointMass& pm) { return pm.mass == 0.0; });
  DiscreteMeasure m;
  m.support_ = aggregate(std::move(masses));
  const double s = total(m.support_);
  if (std::abs(s - 1.0) > kMassTolerance)
    throw Error(ErrorCode::kInvalidMeasure, "total mass " + std::to_string(s) + " is not 1");
  return m;
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<PointMass> masses) {
  std::erase_if(masses, [](const PointMass& pm) { return !(pm.mass > 0.0); });
  const double s = total(masses);
  if (!(s > 0.0)) throw Error(ErrorCode::kInvalidMeasure, "cannot normalise a zero measure");
  for (auto& pm : masses) pm.mass /= s;
  return from_masses(std::move(masses));
}

double DiscreteMeasure::mass_at(const GraphPoint& p) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), p,
                             [](const PointMass& pm, const GraphPoint& q) { return pm.point < q; });
  return it != support_.end() && it->point == p ? it->mass : 0.0;
}

GraphMeasure DiscreteMeasure::as_graph_measure(const MetricGraph& g) const {
  return GraphMeasure::from_parts(g, support_, {});
}

double TransportPlan::mass() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.mass;
  return s;
}

std::vector<PointMass> TransportPlan::source_marginal() const {
  std::vector<PointMass> out;
  for (const auto& e : entries) out.push_back({e.source, e.mass});
  return aggregate(std::move(out));
}

std::vector<PointMass> TransportPlan::target_marginal() const {
  std::vector<PointMass> out;
  for (const auto& e : entries) out.push_back({e.target, e.mass});
  return aggregate(std::move(out));
}

double W2Result::distance() const { return std::sqrt(std::max(0.0, cost)); }

DiscreteMeasure discretize(const MetricGraph& g, const GraphMeasure& m, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid spacing must be positive");
  std::vector<PointMass> out = m.atoms();
  for (const auto& p : m.pieces()) {
    const double width = p.b - p.a;
    const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(width / h - 1e-9)));
    const double cell = width / static_cast<double>(cells);
    for (std::size_t k = 0; k < cells; ++k) {
      const double centre = p.a + (static_cast<double>(k) + 0.5) * cell;
      out.push_back({g.edge_point(p.edge, centre), p.density * cell});
    }
  }
  return DiscreteMeasure::normalized(std::move(out));
}

W2Result w2_graph(const MetricGraph& g, const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  const auto& s1 = m1.support();
  const auto& s2 = m2.support();
  std::vector<double> supply;
  std::vector<double> demand;
  for (const auto& pm : s1) supply.push_back(pm.mass);
  for (const auto& pm : s2) demand.push_back(pm.mass);
  std::vector<double> cost(s1.size() * s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i)
    for (std::size_t j = 0; j < s2.size(); ++j) {
      const double d = g.distance(s1[i].point, s2[j].point);
      cost[i * s2.size() + j] = d * d;
    }

  const TransportSolution sol = solve_transport(supply, demand, cost);
  W2Result result;
  result.cost = sol.cost;
  result.plan.cost = sol.cost;
  for (const auto& f : sol.flows) result.plan.entries.push_back({s1[f.source].point, s2[f.target].point, f.mass});

  const double r1 = marginal_residual(result.plan.source_marginal(), s1);
  const double r2 = marginal_residual(result.plan.target_marginal(), s2);
  if (r1 > kMarginalTolerance || r2 > kMarginalTolerance)
    throw Error(ErrorCode::kSolverError, "transport plan marginal residual exceeds tolerance");
  return result;
}

BranchClass classify_pair(const MetricGraph& g, const OrientedEdge& e, const GraphPoint& x, const GraphPoint& y) {
  if (!g.on_edge(x, e.edge)) throw Error(ErrorCode::kInvalidArgument, "classify_pair: x is not on the edge");
  const double l = g.edge(e.edge).length;
  const double s = g.offset_on(x, e);
  const double d = g.distance(x, y);
  const double tol = kCostTolerance * std::max(1.0, d);
  if (g.on_edge(y, e.edge) && std::abs(std::abs(g.offset_on(y, e) - s) - d) <= tol) return BranchClass::kE;
  const GraphPoint head = g.vertex_point(g.head(e));
  const GraphPoint tail = g.vertex_point(g.tail(e));
  if (std::abs((l - s) + g.distance(head, y) - d) <= tol) return BranchClass::kPlus;
  if (std::abs(s + g.distance(tail, y) - d) <= tol) return BranchClass::kMinus;
  throw Error(ErrorCode::kSolverError, "classify_pair: no geodesic class realises the distance");
}

DecomposedPlan decompose_plan(const MetricGraph& g, const OrientedEdge& e, const TransportPlan& plan) {
  if (!g.is_edge_minimizing(e.edge))
    throw Error(ErrorCode::kNonMinimizingEdge, "edge '" + g.edge(e.edge).id + "' is not minimizing");
  DecomposedPlan out;
  for (const auto& entry : plan.entries) {
    if (!g.on_edge(entry.source, e.edge))
      throw Error(ErrorCode::kInvalidArgument, "plan has source mass off edge '" + g.edge(e.edge).id + "'");
    TransportPlan* part = nullptr;
    switch (classify_pair(g, e, entry.source, entry.target)) {
      case BranchClass::kE: part = &out.e; break;
      case BranchClass::kPlus: part = &out.plus; break;
      case BranchClass::kMinus: part = &out.minus; break;
    }
    part->entries.push_back(entry);
    const double d = g.distance(entry.source, entry.target);
    part->cost += entry.mass * d * d;
  }
  return out;
}

Restriction restrict(const MetricGraph& g, const DiscreteMeasure& m, std::span<const PointMass> part1,
                     const DiscreteMeasure& nu) {
  const std::vector<PointMass> split = aggregate({part1.begin(), part1.end()});
  for (const auto& pm : split) {
    if (pm.mass < 0.0) throw Error(ErrorCode::kInvalidArgument, "restrict: negative sub-measure mass");
    if (pm.mass > m.mass_at(pm.point) * (1.0 + 1e-12) + 1e-15)
      throw Error(ErrorCode::kInvalidArgument, "restrict: sub-measure exceeds the measure");
  }
  const double lambda = total(split);
  if (!(lambda > kMassTolerance && lambda < 1.0 - kMassTolerance))
    throw Error(ErrorCode::kInvalidArgument, "restrict: sub-measure mass must lie strictly between 0 and 1");

  auto part_at = [&](const GraphPoint& p) {
    auto it = std::lower_bound(split.begin(), split.end(), p,
                               [](const PointMass& pm, const GraphPoint& q) { return pm.point < q; });
    return it != split.end() && it->point == p ? std::min(it->mass, m.mass_at(p)) : 0.0;
  };

  const W2Result opt = w2_graph(g, m, nu);
  Restriction r;
  r.lambda = lambda;
  std::vector<PointMass> mu1;
  std::vector<PointMass> mu2;
  for (const auto& pm : m.support()) {
    const double p1 = part_at(pm.point);
    mu1.push_back({pm.point, p1 / lambda});
    mu2.push_back({pm.point, (pm.mass - p1) / (1.0 - lambda)});
  }
  r.mu1 = DiscreteMeasure::normalized(std::move(mu1));
  r.mu2 = DiscreteMeasure::normalized(std::move(mu2));

  for (const auto& entry : opt.plan.entries) {
    const double mx = m.mass_at(entry.source);
    const double p1 = part_at(entry.source);
    const double g1 = p1 / (lambda * mx);
    const double g2 = (mx - p1) / ((1.0 - lambda) * mx);
    const double d = g.distance(entry.source, entry.target);
    if (g1 * entry.mass > 0.0) {
      r.plan1.entries.push_back({entry.source, entry.target, g1 * entry.mass});
      r.plan1.cost += g1 * entry.mass * d * d;
    }
    if (g2 * entry.mass > 0.0) {
      r.plan2.entries.push_back({entry.source, entry.target, g2 * entry.mass});
      r.plan2.cost += g2 * entry.mass * d * d;
    }
  }
  r.nu1 = DiscreteMeasure::normalized(r.plan1.target_marginal());
  r.nu2 = DiscreteMeasure::normalized(r.plan2.target_marginal());
  return r;
}

}  // namespace mgbary
