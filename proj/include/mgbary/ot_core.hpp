#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mgbary/metric_graph.hpp"

namespace mgbary {

inline constexpr double kMarginalTolerance = 1e-10;
inline constexpr double kCostTolerance = 1e-9;

struct PointMass {
  GraphPoint point;
  double mass = 0.0;
};

// Constant density (with respect to length) on offsets [a, b) of an edge,
// offsets measured from the edge's u end.
struct EdgePiece {
  EdgeIndex edge = 0;
  double a = 0.0;
  double b = 0.0;
  double density = 0.0;
};

// Probability measure on a metric graph: atoms plus piecewise-constant
// densities with respect to the length measure on each edge.
class GraphMeasure {
 public:
  // Throws Error(kInvalidMeasure) on bad masses, pieces outside their edge,
  // overlapping pieces on one edge, or total mass away from 1.
  static GraphMeasure from_parts(const MetricGraph& g, std::vector<PointMass> atoms, std::vector<EdgePiece> pieces);

  const std::vector<PointMass>& atoms() const { return atoms_; }
  const std::vector<EdgePiece>& pieces() const { return pieces_; }
  bool is_atomless() const { return atoms_.empty(); }
  double max_density() const;

 private:
  std::vector<PointMass> atoms_;
  std::vector<EdgePiece> pieces_;
};

// Finitely supported probability measure, support sorted and distinct.
class DiscreteMeasure {
 public:
  // Merges repeated points and drops zero masses. Throws
  // Error(kInvalidMeasure) on negative masses or total mass away from 1.
  static DiscreteMeasure from_masses(std::vector<PointMass> masses);
  // As from_masses but rescales to unit mass first (for solver output).
  static DiscreteMeasure normalized(std::vector<PointMass> masses);
  static DiscreteMeasure dirac(const GraphPoint& p) { return from_masses({{p, 1.0}}); }

  const std::vector<PointMass>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }
  double mass_at(const GraphPoint& p) const;
  GraphMeasure as_graph_measure(const MetricGraph& g) const;

 private:
  std::vector<PointMass> support_;
};

struct PlanEntry {
  GraphPoint source;
  GraphPoint target;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;
  double cost = 0.0;  // sum of mass * d(source, target)^2

  double mass() const;
  // Aggregated marginals, sorted by point.
  std::vector<PointMass> source_marginal() const;
  std::vector<PointMass> target_marginal() const;
};

struct W2Result {
  double cost = 0.0;  // squared Wasserstein distance
  TransportPlan plan;

  double distance() const;
};

enum class BranchClass { kE, kPlus, kMinus };

struct DecomposedPlan {
  TransportPlan e;
  TransportPlan plus;
  TransportPlan minus;
};

struct Restriction {
  double lambda = 0.0;
  DiscreteMeasure mu1;
  DiscreteMeasure mu2;
  DiscreteMeasure nu1;
  DiscreteMeasure nu2;
  TransportPlan plan1;  // g1 * pi, optimal between mu1 and nu1
  TransportPlan plan2;
};

// Atoms kept as they are; each density piece becomes cell-centre atoms on a
// uniform grid of spacing at most h.
DiscreteMeasure discretize(const MetricGraph& g, const GraphMeasure& m, double h);

// Exact optimal plan for the squared graph distance. Throws
// Error(kSolverError) if the plan marginals drift beyond kMarginalTolerance.
W2Result w2_graph(const MetricGraph& g, const DiscreteMeasure& m1, const DiscreteMeasure& m2);

// Which side of the oriented edge e a geodesic from x (on e) to y uses.
// Priority E > PLUS > MINUS when several realise d(x, y).
BranchClass classify_pair(const MetricGraph& g, const OrientedEdge& e, const GraphPoint& x, const GraphPoint& y);

// Splits a plan whose sources lie on e by classify_pair. Throws
// Error(kInvalidArgument) for sources off e and Error(kNonMinimizingEdge).
DecomposedPlan decompose_plan(const MetricGraph& g, const OrientedEdge& e, const TransportPlan& plan);

// Writes m = lambda * mu1 + (1 - lambda) * mu2 with lambda * mu1 = part1,
// transports m optimally onto nu and splits the target accordingly:
// nu = lambda * nu1 + (1 - lambda) * nu2.
Restriction restrict(const MetricGraph& g, const DiscreteMeasure& m, std::span<const PointMass> part1,
                     const DiscreteMeasure& nu);

}  // namespace mgbary
