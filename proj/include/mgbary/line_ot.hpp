#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mgbary/error.hpp"

namespace mgbary {

// Total mass must equal one within this tolerance.
inline constexpr double kMassTolerance = 1e-12;

struct LineAtom {
  double x = 0.0;
  double mass = 0.0;
};

// Constant density on [a, b).
struct DensityPiece {
  double a = 0.0;
  double b = 0.0;
  double density = 0.0;
};

// Compactly supported probability measure on the real line made of finitely
// many atoms and piecewise-constant densities. Always stored canonically:
// atoms sorted with distinct positions, pieces sorted and disjoint, adjacent
// pieces of equal density merged, zero masses dropped.
class LineMeasure {
 public:
  // Throws Error(kInvalidMeasure) on negative masses, inverted or
  // overlapping pieces, or total mass away from 1.
  static LineMeasure from_parts(std::vector<LineAtom> atoms, std::vector<DensityPiece> pieces);

  static LineMeasure dirac(double x);
  static LineMeasure uniform(double a, double b);

  const std::vector<LineAtom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  bool has_atoms() const { return !atoms_.empty(); }
  double total_mass() const;

 private:
  std::vector<LineAtom> atoms_;
  std::vector<DensityPiece> pieces_;
};

// One linear segment of a quantile function: value(t) = value + slope * (t - t0)
// on [t0, next t0).
struct QuantileKnot {
  double t = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

// Nondecreasing, right-continuous, piecewise-linear function on (0, 1).
// Jumps between segments correspond to gaps in the support; flat segments
// to atoms; a segment of slope s > 0 to density 1/s.
class QuantileFn {
 public:
  // Knots must start at t = 0, be strictly increasing in t and stay below 1.
  // Throws Error(kInvalidArgument) on a negative slope or a downward jump.
  static QuantileFn from_knots(std::vector<QuantileKnot> knots);

  double operator()(double t) const;
  // Limits at the ends of (0, 1).
  double at_zero() const { return knots_.front().value; }
  double at_one() const;

  const std::vector<QuantileKnot>& knots() const { return knots_; }
  // Right end of segment k.
  double segment_end(std::size_t k) const { return k + 1 < knots_.size() ? knots_[k + 1].t : 1.0; }

 private:
  std::vector<QuantileKnot> knots_;
};

struct WeightedLineMeasure {
  double weight = 0.0;
  LineMeasure measure;
};

// Right-continuous distribution function mu((-inf, x]).
double cdf_eval(const LineMeasure& m, double x);

QuantileFn quantile(const LineMeasure& m);
// Pushforward of Lebesgue measure on (0, 1) under q.
LineMeasure measure_from_quantile(const QuantileFn& q);

// (inf supp, sup supp), read off the quantile function at 0 and 1.
std::pair<double, double> support_bounds(const LineMeasure& m);

// L2 distance of quantile functions, integrated exactly piece by piece.
double w2_line(const QuantileFn& q1, const QuantileFn& q2);
double w2_line(const LineMeasure& m1, const LineMeasure& m2);

// Weighted pointwise sum of quantile functions.
QuantileFn average_quantile(std::span<const WeightedLineMeasure> problem);

// The unique barycenter, whose quantile is the weighted quantile average.
// Throws Error(kInvalidArgument) unless weights are positive and sum to 1.
LineMeasure barycenter_line(std::span<const WeightedLineMeasure> problem);

// Integral over (0,1) of the weighted variance of the quantile values; equals
// the minimal barycenter objective.
double dispersion(std::span<const WeightedLineMeasure> problem);

// sum_i weight_i * W2(mu, measure_i)^2.
double line_objective(std::span<const WeightedLineMeasure> problem, const LineMeasure& mu);

}  // namespace mgbary
