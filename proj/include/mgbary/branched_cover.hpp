#pragma once

#include <span>
#include <vector>

#include "mgbary/line_ot.hpp"
#include "mgbary/ot_core.hpp"

namespace mgbary {

// A minimizing oriented edge e together with a base measure supported on e.
// The unfolding map sends ν to a measure on the real line by transporting the
// base optimally onto ν and reading each target through the distance map
// matching the side of e its geodesic leaves by.
class CoverContext {
 public:
  // Throws Error(kNonMinimizingEdge) or Error(kInvalidArgument) when the base
  // has mass off e. The graph must outlive the context.
  CoverContext(const MetricGraph& g, OrientedEdge e, DiscreteMeasure base);

  const MetricGraph& graph() const { return *graph_; }
  const OrientedEdge& edge() const { return edge_; }
  const DiscreteMeasure& base() const { return base_; }
  double edge_length() const { return graph_->edge(edge_.edge).length; }

 private:
  const MetricGraph* graph_;
  OrientedEdge edge_;
  DiscreteMeasure base_;
};

// E: d(tail, y); PLUS: l(e) + d(head, y); MINUS: -d(tail, y).
double h_eval(const CoverContext& ctx, BranchClass tag, const GraphPoint& y);

struct PhiParts {
  LineMeasure measure;
  std::vector<LineAtom> e;      // lands in [0, l]
  std::vector<LineAtom> plus;   // lands in (l, inf)
  std::vector<LineAtom> minus;  // lands in (-inf, 0)
};

LineMeasure phi(const CoverContext& ctx, const DiscreteMeasure& nu);
PhiParts phi_parts(const CoverContext& ctx, const DiscreteMeasure& nu);

// A measure supported on e, read as a measure on [0, l] through offsets.
LineMeasure edge_to_line(const CoverContext& ctx, const DiscreteMeasure& mu);
// Inverse of edge_to_line for measures on [0, l]; density pieces become
// cell-centre atoms of spacing at most h.
DiscreteMeasure line_to_edge(const CoverContext& ctx, const LineMeasure& m, double h);

// Image of a density piece under one of the distance maps. The map is an
// isometry on each side of the edge's cut point, so the image is one or two
// pieces carrying the same density.
std::vector<DensityPiece> push_forward_piece(const CoverContext& ctx, BranchClass tag, const EdgePiece& piece);

// Values where the number of preimages of the distance map can change:
// images of vertices and of cut points seen from the map's base vertex.
// The domain is the closed edge e for E and the rest of the graph otherwise.
std::vector<double> exceptional_values(const CoverContext& ctx, BranchClass tag);

// Number of domain points y with h(y) = value. Throws
// Error(kInvalidArgument) within 1e-9 of an exceptional value.
std::size_t preimage_count(const CoverContext& ctx, BranchClass tag, double value);

struct LinePlanEntry {
  double source = 0.0;
  double target = 0.0;
  double mass = 0.0;
};

struct LiftedPlanEntry {
  double source = 0.0;
  GraphPoint target;
  double mass = 0.0;
};

// Lifts a plan on R x R to R x G: each target value is split over its
// preimages in supp(ν) in proportion to ν. Throws Error(kInvalidArgument) when
// a target value carrying mass has no preimage in the support.
std::vector<LiftedPlanEntry> lift_line_plan(const CoverContext& ctx, BranchClass tag,
                                            std::span<const LinePlanEntry> plan, const DiscreteMeasure& nu);

}  // namespace mgbary
