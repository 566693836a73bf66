#pragma once

// Fixtures, seeded generators and independent reference computations shared
// by the test binaries. Nothing here calls the library's distance or
// transport code, so the oracles stay independent of what they check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "mgbary/barycenter.hpp"
#include "mgbary/line_ot.hpp"
#include "mgbary/metric_graph.hpp"
#include "mgbary/ot_core.hpp"
#include "mgbary/simplex.hpp"

namespace testing_support {

using namespace mgbary;

inline MetricGraph make_graph(std::vector<std::string> vertices, std::vector<EdgeSpec> edges) {
  return build_graph({std::move(vertices), std::move(edges)});
}

inline MetricGraph triangle() {
  return make_graph({"A", "B", "C"}, {{"e_AB", "A", "B", 1}, {"e_BC", "B", "C", 1}, {"e_AC", "A", "C", 1}});
}

inline MetricGraph tripod() {
  return make_graph({"o", "t1", "t2", "t3"}, {{"e1", "o", "t1", 1}, {"e2", "o", "t2", 1}, {"e3", "o", "t3", 1}});
}

inline MetricGraph unit_square() {
  return make_graph({"A", "B", "C", "D"},
                    {{"e_AB", "A", "B", 1}, {"e_BC", "B", "C", 1}, {"e_CD", "C", "D", 1}, {"e_DA", "D", "A", 1}});
}

// Unit square A-B-C-D with a diagonal chord A-C of length 1.5.
inline MetricGraph square_with_chord() {
  return make_graph({"A", "B", "C", "D"}, {{"e_AB", "A", "B", 1},
                                           {"e_BC", "B", "C", 1},
                                           {"e_CD", "C", "D", 1},
                                           {"e_DA", "D", "A", 1},
                                           {"e_AC", "A", "C", 1.5}});
}

inline MetricGraph segment(double length) { return make_graph({"a", "b"}, {{"e", "a", "b", length}}); }

inline MetricGraph five_cycle() {
  return make_graph({"P0", "P1", "P2", "P3", "P4"}, {{"c0", "P0", "P1", 1},
                                                     {"c1", "P1", "P2", 1},
                                                     {"c2", "P2", "P3", 1},
                                                     {"c3", "P3", "P4", 1},
                                                     {"c4", "P4", "P0", 1}});
}

inline EdgeIndex edge_of(const MetricGraph& g, const std::string& id) { return *g.find_edge(id); }
inline VertexIndex vertex_of(const MetricGraph& g, const std::string& id) { return *g.find_vertex(id); }

// Offsets on a 1/1024 lattice keep all distance sums exact in binary.
inline GraphPoint dyadic_point(const MetricGraph& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick_edge(0, g.num_edges() - 1);
  const EdgeIndex e = pick_edge(rng);
  const auto steps = static_cast<long>(std::lround(g.edge(e).length * 1024));
  std::uniform_int_distribution<long> pick(0, steps);
  return g.edge_point(e, static_cast<double>(pick(rng)) / 1024.0);
}

inline GraphPoint point_on_edge(const MetricGraph& g, EdgeIndex e, std::mt19937_64& rng) {
  const auto steps = static_cast<long>(std::lround(g.edge(e).length * 1024));
  std::uniform_int_distribution<long> pick(0, steps);
  return g.edge_point(e, static_cast<double>(pick(rng)) / 1024.0);
}

inline std::vector<double> random_masses(std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> m(k);
  for (double& x : m) x = u(rng);
  return m;
}

inline DiscreteMeasure random_discrete(const MetricGraph& g, std::size_t k, std::mt19937_64& rng) {
  std::vector<PointMass> pm;
  const auto masses = random_masses(k, rng);
  for (std::size_t i = 0; i < k; ++i) pm.push_back({dyadic_point(g, rng), masses[i]});
  return DiscreteMeasure::normalized(std::move(pm));
}

inline DiscreteMeasure random_discrete_on_edge(const MetricGraph& g, EdgeIndex e, std::size_t k, std::mt19937_64& rng) {
  std::vector<PointMass> pm;
  const auto masses = random_masses(k, rng);
  for (std::size_t i = 0; i < k; ++i) pm.push_back({point_on_edge(g, e, rng), masses[i]});
  return DiscreteMeasure::normalized(std::move(pm));
}

inline LineMeasure random_line_atoms(std::size_t k, std::mt19937_64& rng, double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> pos(lo, hi);
  const auto masses = random_masses(k, rng);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  std::vector<LineAtom> atoms;
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({pos(rng), masses[i] / total});
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  atoms.back().mass += 1.0 - s;
  return LineMeasure::from_parts(std::move(atoms), {});
}

// Mixture of atoms and disjoint density pieces with random masses.
inline LineMeasure random_line_measure(std::mt19937_64& rng, bool allow_atoms = true) {
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int pieces = count(rng);
  const int atoms = allow_atoms ? count(rng) - 1 : 0;
  double x = -3.0 + 2.0 * u(rng);
  std::vector<DensityPiece> dp;
  std::vector<double> masses = random_masses(static_cast<std::size_t>(pieces + atoms), rng);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  for (int i = 0; i < pieces; ++i) {
    const double a = x + 0.1 + u(rng);
    const double b = a + 0.2 + u(rng);
    dp.push_back({a, b, masses[static_cast<std::size_t>(i)] / total / (b - a)});
    x = b;
  }
  std::vector<LineAtom> at;
  for (int i = 0; i < atoms; ++i) at.push_back({-4.0 + 8.0 * u(rng), masses[static_cast<std::size_t>(pieces + i)] / total});
  return LineMeasure::from_parts(std::move(at), std::move(dp));
}

// All-pairs vertex distances by Floyd-Warshall.
inline std::vector<std::vector<double>> floyd(const MetricGraph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, std::numeric_limits<double>::infinity()));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const Edge& e : g.edges()) {
    d[e.u][e.v] = std::min(d[e.u][e.v], e.length);
    d[e.v][e.u] = std::min(d[e.v][e.u], e.length);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Distance from a vertex to a point, from the Floyd table.
inline double oracle_vertex_distance(const MetricGraph& g, const std::vector<std::vector<double>>& d, VertexIndex v,
                                     const GraphPoint& p) {
  if (p.is_vertex()) return d[v][p.vertex_index()];
  const Edge& e = g.edge(p.edge_index());
  return std::min(d[v][e.u] + p.offset(), d[v][e.v] + e.length - p.offset());
}

inline double oracle_distance(const MetricGraph& g, const std::vector<std::vector<double>>& d, const GraphPoint& p,
                              const GraphPoint& q) {
  if (p.is_vertex()) return oracle_vertex_distance(g, d, p.vertex_index(), q);
  const Edge& e = g.edge(p.edge_index());
  double best = std::min(p.offset() + oracle_vertex_distance(g, d, e.u, q),
                         e.length - p.offset() + oracle_vertex_distance(g, d, e.v, q));
  if (!q.is_vertex() && q.edge_index() == p.edge_index()) best = std::min(best, std::abs(p.offset() - q.offset()));
  return best;
}

// Cut points seen from v, located on a subdivision of every edge into
// `samples` pieces: interior local maxima of the distance to v.
struct SampledCut {
  EdgeIndex edge;
  double offset;
};

inline std::vector<SampledCut> sampled_cut_points(const MetricGraph& g, VertexIndex v, std::size_t samples) {
  // Nodes: vertices first, then interior samples edge by edge.
  const std::size_t nv = g.num_vertices();
  const std::size_t per_edge = samples - 1;
  const std::size_t n = nv + g.num_edges() * per_edge;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  auto node = [&](EdgeIndex e, std::size_t k) -> std::size_t {
    if (k == 0) return g.edge(e).u;
    if (k == samples) return g.edge(e).v;
    return nv + e * per_edge + (k - 1);
  };
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const double step = g.edge(e).length / static_cast<double>(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      adj[node(e, k)].push_back({node(e, k + 1), step});
      adj[node(e, k + 1)].push_back({node(e, k), step});
    }
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[v] = 0.0;
  pq.push({0.0, v});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    for (auto [w, len] : adj[u])
      if (du + len < dist[w]) {
        dist[w] = du + len;
        pq.push({dist[w], w});
      }
  }
  std::vector<SampledCut> out;
  const double eps = 1e-12;
  for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
    const double step = g.edge(e).length / static_cast<double>(samples);
    for (std::size_t k = 1; k < samples; ++k) {
      const double here = dist[node(e, k)];
      const double left = dist[node(e, k - 1)];
      const double right = dist[node(e, k + 1)];
      if (here + eps < left || here + eps < right) continue;
      // A plateau of two equal samples is one maximum; keep its midpoint.
      if (std::abs(here - right) <= eps && k + 1 < samples) {
        out.push_back({e, (static_cast<double>(k) + 0.5) * step});
        ++k;
        continue;
      }
      if (std::abs(here - left) <= eps) continue;
      out.push_back({e, static_cast<double>(k) * step});
    }
  }
  return out;
}

// Optimal transport cost between finitely supported measures by the simplex
// method on the transportation LP; `cost(i, j)` gives the pair cost.
template <class Cost>
double lp_transport_cost(const std::vector<double>& a, const std::vector<double>& b, Cost cost) {
  lp::LinearProgram program(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) program.set_rhs(i, a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) program.set_rhs(a.size() + j, b[j]);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const lp::Entry col[] = {{i, 1.0}, {a.size() + j, 1.0}};
      program.add_column(cost(i, j), col);
    }
  const lp::LpResult r = lp::solve(program);
  if (r.status != lp::LpStatus::kOptimal) return std::numeric_limits<double>::quiet_NaN();
  return r.objective;
}

// Squared W2 on the graph using the simplex LP and Floyd distances.
inline double lp_w2_graph(const MetricGraph& g, const DiscreteMeasure& m1, const DiscreteMeasure& m2) {
  const auto d = floyd(g);
  std::vector<double> a, b;
  for (const auto& p : m1.support()) a.push_back(p.mass);
  for (const auto& p : m2.support()) b.push_back(p.mass);
  return lp_transport_cost(a, b, [&](std::size_t i, std::size_t j) {
    const double x = oracle_distance(g, d, m1.support()[i].point, m2.support()[j].point);
    return x * x;
  });
}

// Minimum over all permutations; both sides carry n equal masses.
inline double permutation_w2(const std::vector<double>& cost_matrix, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost_matrix[i * n + perm[i]];
    best = std::min(best, c / static_cast<double>(n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Quantile at t by bisection on the distribution function.
inline double bisect_quantile(const LineMeasure& m, double t, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf_eval(m, mid) > t) hi = mid;
    else lo = mid;
  }
  return hi;
}

// Random measure made of one or two density pieces on random edges, with up
// to two atoms when allowed. Piece ends sit on the 1/16 lattice.
inline GraphMeasure random_graph_measure(const MetricGraph& g, std::mt19937_64& rng, bool allow_atoms) {
  std::uniform_int_distribution<EdgeIndex> pick(0, g.num_edges() - 1);
  std::uniform_int_distribution<int> count(1, 2);
  const int npieces = std::min<int>(count(rng), static_cast<int>(g.num_edges()));
  const int natoms = allow_atoms ? count(rng) : 0;
  const auto masses = random_masses(static_cast<std::size_t>(npieces + natoms), rng);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  std::vector<EdgePiece> pieces;
  std::vector<EdgeIndex> used;
  for (int i = 0; i < npieces; ++i) {
    EdgeIndex e = pick(rng);
    if (std::find(used.begin(), used.end(), e) != used.end()) e = (e + 1) % g.num_edges();
    used.push_back(e);
    const auto steps = static_cast<int>(std::lround(g.edge(e).length * 16));
    std::uniform_int_distribution<int> start(0, steps - 4);
    const int a = start(rng);
    std::uniform_int_distribution<int> width(4, steps - a);
    const int b = a + width(rng);
    pieces.push_back({e, a / 16.0, b / 16.0, masses[static_cast<std::size_t>(i)] / total / ((b - a) / 16.0)});
  }
  std::vector<PointMass> atoms;
  for (int i = 0; i < natoms; ++i)
    atoms.push_back({dyadic_point(g, rng), masses[static_cast<std::size_t>(npieces + i)] / total});
  std::sort(atoms.begin(), atoms.end(), [](const PointMass& x, const PointMass& y) { return x.point < y.point; });
  for (std::size_t i = 1; i < atoms.size(); ++i)
    if (atoms[i].point == atoms[i - 1].point) atoms[i].point = g.vertex_point(0);
  // Fix the rounding in the total so the strict mass check passes.
  double sum = 0.0;
  for (const auto& p : pieces) sum += p.density * (p.b - p.a);
  for (const auto& a : atoms) sum += a.mass;
  for (auto& p : pieces) p.density /= sum;
  for (auto& a : atoms) a.mass /= sum;
  return GraphMeasure::from_parts(g, std::move(atoms), std::move(pieces));
}

// Two to four measures with random weights; the first one is atomless.
inline std::vector<WeightedGraphMeasure> random_family(const MetricGraph& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(2, 4);
  const int k = count(rng);
  auto w = random_masses(static_cast<std::size_t>(k), rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<WeightedGraphMeasure> out;
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double wi = w[static_cast<std::size_t>(i)] / total;
    out.push_back({wi, random_graph_measure(g, rng, i > 0 && rng() % 2 == 0)});
    sum += wi;
  }
  out.back().weight += 1.0 - sum;
  return out;
}

// Density 2 on the outer half of each tripod branch, weights 1/3.
inline std::vector<WeightedGraphMeasure> tripod_halves_family(const MetricGraph& tri) {
  std::vector<WeightedGraphMeasure> out;
  for (EdgeIndex e = 0; e < 3; ++e)
    out.push_back({e == 2 ? 1.0 - 2.0 / 3.0 : 1.0 / 3.0, GraphMeasure::from_parts(tri, {}, {{e, 0.5, 1.0, 2.0}})});
  return out;
}

// Line measure of a discrete measure supported on one edge, offsets from u.
inline LineMeasure offsets_on_edge(const MetricGraph& g, EdgeIndex e, const DiscreteMeasure& m) {
  std::vector<LineAtom> atoms;
  for (const auto& pm : m.support()) atoms.push_back({g.offset_on(pm.point, e), pm.mass});
  return LineMeasure::from_parts(std::move(atoms), {});
}

}  // namespace testing_support
