#include "mgbary/line_ot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mgbary {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

// Visits the common refinement of several quantile partitions. For each
// interval [t, t + dt) the callback receives each function's value at t and
// its slope there.
template <class Fn>
void for_each_common_segment(std::span<const QuantileFn* const> qs, Fn&& fn) {
  std::vector<double> ts;
  for (const QuantileFn* q : qs)
    for (const auto& k : q->knots()) ts.push_back(k.t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<std::size_t> cursor(qs.size(), 0);
  std::vector<double> values(qs.size());
  std::vector<double> slopes(qs.size());
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double t = ts[j];
    const double dt = (j + 1 < ts.size() ? ts[j + 1] : 1.0) - t;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const auto& knots = qs[i]->knots();
      while (cursor[i] + 1 < knots.size() && knots[cursor[i] + 1].t <= t) ++cursor[i];
      const QuantileKnot& k = knots[cursor[i]];
      values[i] = k.value + k.slope * (t - k.t);
      slopes[i] = k.slope;
    }
    fn(t, dt, std::span<const double>(values), std::span<const double>(slopes));
  }
}

// Integral over [0, dt) of (v + s * tau)^2.
double square_integral(double v, double s, double dt) {
  return v * v * dt + v * s * dt * dt + s * s * dt * dt * dt / 3.0;
}

void check_weights(std::span<const WeightedLineMeasure> problem) {
  if (problem.empty()) throw Error(ErrorCode::kInvalidArgument, "barycenter problem has no measures");
  double total = 0.0;
  for (const auto& wm : problem) {
    if (!(wm.weight > 0.0)) throw Error(ErrorCode::kInvalidArgument, "barycenter weights must be positive");
    total += wm.weight;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw Error(ErrorCode::kInvalidArgument, "barycenter weights must sum to 1");
}

}  // namespace

LineMeasure LineMeasure::from_parts(std::vector<LineAtom> atoms, std::vector<DensityPiece> pieces) {
  LineMeasure m;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.x) || !std::isfinite(a.mass) || a.mass < 0.0)
      throw Error(ErrorCode::kInvalidMeasure, "atom masses must be finite and nonnegative");
    if (a.mass > 0.0) m.atoms_.push_back(a);
  }
  for (const auto& p : pieces) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.density) || p.density < 0.0)
      throw Error(ErrorCode::kInvalidMeasure, "densities must be finite and nonnegative");
    if (p.a > p.b) throw Error(ErrorCode::kInvalidMeasure, "density piece with a > b");
    if (p.density > 0.0 && p.b > p.a) m.pieces_.push_back(p);
  }

  std::sort(m.atoms_.begin(), m.atoms_.end(), [](const LineAtom& l, const LineAtom& r) { return l.x < r.x; });
  std::vector<LineAtom> merged_atoms;
  for (const auto& a : m.atoms_) {
    if (!merged_atoms.empty() && close(merged_atoms.back().x, a.x))
      merged_atoms.back().mass += a.mass;
    else
      merged_atoms.push_back(a);
  }
  m.atoms_ = std::move(merged_atoms);

  std::sort(m.pieces_.begin(), m.pieces_.end(),
            [](const DensityPiece& l, const DensityPiece& r) { return l.a < r.a; });
  std::vector<DensityPiece> merged_pieces;
  for (const auto& p : m.pieces_) {
    if (!merged_pieces.empty()) {
      DensityPiece& prev = merged_pieces.back();
      if (prev.b > p.a && !close(prev.b, p.a))
        throw Error(ErrorCode::kInvalidMeasure, "density pieces overlap");
      if (close(prev.b, p.a) && close(prev.density, p.density)) {
        prev.b = p.b;
        continue;
      }
    }
    merged_pieces.push_back(p);
  }
  m.pieces_ = std::move(merged_pieces);

  const double total = m.total_mass();
  if (std::abs(total - 1.0) > kMassTolerance)
    throw Error(ErrorCode::kInvalidMeasure, "total mass " + std::to_string(total) + " is not 1");
  return m;
}

LineMeasure LineMeasure::dirac(double x) { return from_parts({{x, 1.0}}, {}); }

LineMeasure LineMeasure::uniform(double a, double b) { return from_parts({}, {{a, b, 1.0 / (b - a)}}); }

double LineMeasure::total_mass() const {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.mass;
  for (const auto& p : pieces_) total += p.density * (p.b - p.a);
  return total;
}

QuantileFn QuantileFn::from_knots(std::vector<QuantileKnot> knots) {
  if (knots.empty() || knots.front().t != 0.0)
    throw Error(ErrorCode::kInvalidArgument, "quantile knots must start at t = 0");
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const auto& kn = knots[k];
    if (!std::isfinite(kn.value) || !std::isfinite(kn.slope) || !(kn.t >= 0.0 && kn.t < 1.0))
      throw Error(ErrorCode::kInvalidArgument, "quantile knot out of range");
    if (kn.slope < 0.0) throw Error(ErrorCode::kInvalidArgument, "quantile function has a decreasing segment");
    if (k > 0) {
      const auto& prev = knots[k - 1];
      if (!(kn.t > prev.t)) throw Error(ErrorCode::kInvalidArgument, "quantile knots must increase in t");
      const double prev_end = prev.value + prev.slope * (kn.t - prev.t);
      if (kn.value < prev_end && !close(kn.value, prev_end))
        throw Error(ErrorCode::kInvalidArgument, "quantile function jumps downward");
    }
  }

  QuantileFn q;
  for (const auto& kn : knots) {
    if (!q.knots_.empty()) {
      const auto& prev = q.knots_.back();
      const double prev_end = prev.value + prev.slope * (kn.t - prev.t);
      if (close(kn.value, prev_end) && close(kn.slope, prev.slope)) continue;
    }
    q.knots_.push_back(kn);
  }
  return q;
}

double QuantileFn::operator()(double t) const {
  if (t >= 1.0) return at_one();
  if (t <= 0.0) return at_zero();
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const QuantileKnot& k) { return v < k.t; });
  const QuantileKnot& k = *std::prev(it);
  return k.value + k.slope * (t - k.t);
}

double QuantileFn::at_one() const {
  const auto& k = knots_.back();
  return k.value + k.slope * (1.0 - k.t);
}

double cdf_eval(const LineMeasure& m, double x) {
  double f = 0.0;
  for (const auto& a : m.atoms())
    if (a.x <= x) f += a.mass;
  for (const auto& p : m.pieces()) f += p.density * (std::clamp(x, p.a, p.b) - p.a);
  return std::clamp(f, 0.0, 1.0);
}

QuantileFn quantile(const LineMeasure& m) {
  struct Event {
    double pos;
    bool atom;
    double end;
    double mass;
  };
  std::vector<Event> events;
  for (const auto& a : m.atoms()) events.push_back({a.x, true, a.x, a.mass});
  // Pieces are split at interior atoms so events never overlap.
  for (const auto& p : m.pieces()) {
    double start = p.a;
    for (const auto& a : m.atoms()) {
      if (a.x > start && a.x < p.b) {
        events.push_back({start, false, a.x, p.density * (a.x - start)});
        start = a.x;
      }
    }
    events.push_back({start, false, p.b, p.density * (p.b - start)});
  }
  std::sort(events.begin(), events.end(), [](const Event& l, const Event& r) {
    if (l.pos != r.pos) return l.pos < r.pos;
    return l.atom && !r.atom;
  });

  double total = 0.0;
  for (const auto& ev : events) total += ev.mass;

  std::vector<QuantileKnot> knots;
  double t = 0.0;
  for (const auto& ev : events) {
    const double dt = ev.mass / total;
    if (!(dt > 0.0) || t + dt == t || t >= 1.0) continue;
    knots.push_back({t, ev.pos, ev.atom ? 0.0 : (ev.end - ev.pos) / dt});
    t += dt;
  }
  return QuantileFn::from_knots(std::move(knots));
}

LineMeasure measure_from_quantile(const QuantileFn& q) {
  std::vector<LineAtom> atoms;
  std::vector<DensityPiece> pieces;
  const auto& knots = q.knots();
  for (std::size_t k = 0; k < knots.size(); ++k) {
    const double dt = q.segment_end(k) - knots[k].t;
    const double v = knots[k].value;
    const double end = v + knots[k].slope * dt;
    if (knots[k].slope == 0.0 || end == v)
      atoms.push_back({v, dt});
    else
      pieces.push_back({v, end, dt / (end - v)});
  }
  return LineMeasure::from_parts(std::move(atoms), std::move(pieces));
}

std::pair<double, double> support_bounds(const LineMeasure& m) {
  const QuantileFn q = quantile(m);
  return {q.at_zero(), q.at_one()};
}

double w2_line(const QuantileFn& q1, const QuantileFn& q2) {
  const QuantileFn* qs[] = {&q1, &q2};
  double total = 0.0;
  for_each_common_segment(std::span<const QuantileFn* const>(qs),
                          [&](double, double dt, std::span<const double> v, std::span<const double> s) {
                            total += square_integral(v[0] - v[1], s[0] - s[1], dt);
                          });
  return std::sqrt(std::max(0.0, total));
}

double w2_line(const LineMeasure& m1, const LineMeasure& m2) { return w2_line(quantile(m1), quantile(m2)); }

QuantileFn average_quantile(std::span<const WeightedLineMeasure> problem) {
  check_weights(problem);
  std::vector<QuantileFn> qs;
  qs.reserve(problem.size());
  for (const auto& wm : problem) qs.push_back(quantile(wm.measure));
  std::vector<const QuantileFn*> ptrs;
  for (const auto& q : qs) ptrs.push_back(&q);

  std::vector<QuantileKnot> knots;
  for_each_common_segment(std::span<const QuantileFn* const>(ptrs),
                          [&](double t, double, std::span<const double> v, std::span<const double> s) {
                            QuantileKnot k{t, 0.0, 0.0};
                            for (std::size_t i = 0; i < problem.size(); ++i) {
                              k.value += problem[i].weight * v[i];
                              k.slope += problem[i].weight * s[i];
                            }
                            knots.push_back(k);
                          });
  // Rounding in the weighted sums can create sub-ulp downward steps.
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const double prev_end = knots[k - 1].value + knots[k - 1].slope * (knots[k].t - knots[k - 1].t);
    if (knots[k].value < prev_end && close(knots[k].value, prev_end)) knots[k].value = prev_end;
  }
  return QuantileFn::from_knots(std::move(knots));
}

LineMeasure barycenter_line(std::span<const WeightedLineMeasure> problem) {
  return measure_from_quantile(average_quantile(problem));
}

double dispersion(std::span<const WeightedLineMeasure> problem) {
  check_weights(problem);
  std::vector<QuantileFn> qs;
  for (const auto& wm : problem) qs.push_back(quantile(wm.measure));
  std::vector<const QuantileFn*> ptrs;
  for (const auto& q : qs) ptrs.push_back(&q);

  double mean_of_squares = 0.0;
  double square_of_mean = 0.0;
  for_each_common_segment(std::span<const QuantileFn* const>(ptrs),
                          [&](double, double dt, std::span<const double> v, std::span<const double> s) {
                            double mv = 0.0;
                            double ms = 0.0;
                            for (std::size_t i = 0; i < problem.size(); ++i) {
                              mean_of_squares += problem[i].weight * square_integral(v[i], s[i], dt);
                              mv += problem[i].weight * v[i];
                              ms += problem[i].weight * s[i];
                            }
                            square_of_mean += square_integral(mv, ms, dt);
                          });
  return std::max(0.0, mean_of_squares - square_of_mean);
}

double line_objective(std::span<const WeightedLineMeasure> problem, const LineMeasure& mu) {
  const QuantileFn qmu = quantile(mu);
  double total = 0.0;
  for (const auto& wm : problem) {
    const double d = w2_line(qmu, quantile(wm.measure));
    total += wm.weight * d * d;
  }
  return total;
}

}  // namespace mgbary
