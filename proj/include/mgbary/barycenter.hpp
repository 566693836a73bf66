#pragma once

#include <optional>
#include <vector>

#include "mgbary/branched_cover.hpp"
#include "mgbary/line_ot.hpp"
#include "mgbary/ot_core.hpp"

namespace mgbary {

struct WeightedGraphMeasure {
  double weight = 0.0;
  GraphMeasure measure;
};

// Finite family of measures with positive weights summing to one, plus the
// grid spacing at which densities are discretized. Holds a reference to the
// graph, which must outlive it.
class BarycenterProblem {
 public:
  BarycenterProblem(const MetricGraph& g, std::vector<WeightedGraphMeasure> measures, double grid);

  const MetricGraph& graph() const { return *graph_; }
  const std::vector<WeightedGraphMeasure>& measures() const { return measures_; }
  double grid() const { return grid_; }
  std::size_t size() const { return measures_.size(); }
  double weight(std::size_t i) const { return measures_[i].weight; }
  const DiscreteMeasure& discretized(std::size_t i) const { return discrete_[i]; }

  // Total weight carried by measures without atoms.
  double atomless_weight() const;
  double max_input_density() const;

 private:
  const MetricGraph* graph_;
  std::vector<WeightedGraphMeasure> measures_;
  double grid_;
  std::vector<DiscreteMeasure> discrete_;
};

// sum_i weight_i * W2(mu, discretize(nu_i))^2.
double objective(const BarycenterProblem& problem, const DiscreteMeasure& mu);

// Grid nodes at spacing at most h on every edge, all vertices, and every
// support point of the discretized inputs; sorted and distinct.
std::vector<GraphPoint> candidate_support(const BarycenterProblem& problem);

struct LpOptions {
  std::size_t support_cap = 4000;
  // Added to the candidate support, e.g. to solve related problems on a
  // common set of points.
  std::vector<GraphPoint> extra_support;
};

struct LpBarycenter {
  DiscreteMeasure mu;
  double objective = 0.0;
  std::size_t candidates = 0;
  std::size_t iterations = 0;
};

// Fixed-support barycenter LP: minimise sum_i weight_i <d^2, pi_i> over a
// free measure mu on the candidate support and couplings pi_i with first
// marginal mu and second marginal discretize(nu_i). Throws
// Error(kSupportCapExceeded) above the cap and Error(kSolverError) if the
// simplex does not reach optimality.
LpBarycenter solve_lp(const BarycenterProblem& problem, const LpOptions& options = {});

// Pointwise median(lo, q(t), hi).
QuantileFn clamp_quantile(const QuantileFn& q, double lo, double hi);

struct FixedPointOptions {
  std::size_t max_iter = 200;
  std::optional<double> eps;  // defaults to 1e-6 * l(e)
  bool start_at_tail = false;  // start from a Dirac at the tail vertex
  unsigned threads = 1;
};

struct FixedPointResult {
  DiscreteMeasure mu;
  std::size_t iterations = 0;
  bool converged = false;
  double last_step = 0.0;
  double objective = 0.0;
};

// Iterates mu -> pull back of clamp(average quantile of the unfolded inputs,
// 0, l(e)) with the unfolding based at mu. A fixed point satisfies the
// clamped-quantile characterization of barycenters supported in e.
FixedPointResult solve_edge_fixed_point(const BarycenterProblem& problem, const OrientedEdge& e,
                                        const FixedPointOptions& options = {});

// One step of the iteration above, exposed for verification.
DiscreteMeasure fixed_point_step(const BarycenterProblem& problem, const CoverContext& ctx, unsigned threads = 1);

enum class Verdict { kPass, kFail, kHypothesisNotMet };

struct RegularityReport {
  std::vector<PointMass> interior_atoms;
  std::vector<PointMass> vertex_atoms;
  double max_interior_mass = 0.0;
  double max_interior_density = 0.0;  // max interior mass / grid spacing
  double ceiling = 0.0;               // grid * max input density / atomless weight
  double atom_tol = 0.0;
  double atomless_weight = 0.0;
  Verdict verdict = Verdict::kPass;
};

// Interior support points of mu heavier than atom_tol are reported as atoms.
// The default tolerance is five times the absolutely continuous ceiling.
// When no input is atomless the verdict is kHypothesisNotMet.
RegularityReport regularity_report(const BarycenterProblem& problem, const DiscreteMeasure& mu,
                                   std::optional<double> atom_tol = std::nullopt);

}  // namespace mgbary
