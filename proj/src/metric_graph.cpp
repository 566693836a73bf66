#include "mgbary/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mgbary {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> dijkstra(const std::vector<Edge>& edges,
                             const std::vector<std::vector<EdgeIndex>>& adjacency,
                             VertexIndex source) {
  std::vector<double> dist(adjacency.size(), kInf);
  using Item = std::pair<double, VertexIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (EdgeIndex e : adjacency[v]) {
      const Edge& edge = edges[e];
      VertexIndex w = edge.u == v ? edge.v : edge.u;
      double nd = d + edge.length;
      if (nd < dist[w]) {
        dist[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
  return dist;
}

}  // namespace

MetricGraph build_graph(const GraphDescription& spec) {
  if (spec.vertices.empty()) throw GraphError(GraphDefect::kEmpty, "graph has no vertices");

  MetricGraph g;
  for (const auto& name : spec.vertices) {
    if (!g.vertex_lookup_.emplace(name, g.vertex_names_.size()).second)
      throw GraphError(GraphDefect::kDuplicateId, "duplicate vertex id '" + name + "'");
    g.vertex_names_.push_back(name);
  }
  g.adjacency_.resize(g.vertex_names_.size());
  g.min_length_ = kInf;

  for (const auto& es : spec.edges) {
    auto u = g.vertex_lookup_.find(es.u);
    auto v = g.vertex_lookup_.find(es.v);
    if (u == g.vertex_lookup_.end() || v == g.vertex_lookup_.end())
      throw GraphError(GraphDefect::kUnknownVertex, "edge '" + es.id + "' references an unknown vertex");
    if (u->second == v->second)
      throw GraphError(GraphDefect::kSelfLoop, "edge '" + es.id + "' is a self-loop at '" + es.u + "'");
    if (!(es.length > 0.0) || !std::isfinite(es.length))
      throw GraphError(GraphDefect::kNonPositiveLength,
                       "edge '" + es.id + "' must have a positive finite length");
    if (!g.edge_lookup_.emplace(es.id, g.edges_.size()).second)
      throw GraphError(GraphDefect::kDuplicateId, "duplicate edge id '" + es.id + "'");
    EdgeIndex idx = g.edges_.size();
    g.edges_.push_back(Edge{es.id, u->second, v->second, es.length});
    g.adjacency_[u->second].push_back(idx);
    g.adjacency_[v->second].push_back(idx);
    g.min_length_ = std::min(g.min_length_, es.length);
  }

  for (VertexIndex v = 0; v < g.vertex_names_.size(); ++v) {
    if (g.adjacency_[v].empty())
      throw GraphError(GraphDefect::kIsolatedVertex, "vertex '" + g.vertex_names_[v] + "' has no incident edge");
  }

  const std::size_t n = g.vertex_names_.size();
  g.vertex_dist_.assign(n * n, kInf);
  for (VertexIndex s = 0; s < n; ++s) {
    auto row = dijkstra(g.edges_, g.adjacency_, s);
    for (VertexIndex t = 0; t < n; ++t) {
      if (!std::isfinite(row[t]))
        throw GraphError(GraphDefect::kDisconnected,
                         "vertices '" + g.vertex_names_[s] + "' and '" + g.vertex_names_[t] + "' are not connected");
      g.vertex_dist_[s * n + t] = row[t];
    }
  }
  // Path sums accumulated in opposite orders can differ in the last bit.
  for (VertexIndex s = 0; s < n; ++s)
    for (VertexIndex t = s + 1; t < n; ++t) {
      double d = std::min(g.vertex_dist_[s * n + t], g.vertex_dist_[t * n + s]);
      g.vertex_dist_[s * n + t] = g.vertex_dist_[t * n + s] = d;
    }
  return g;
}

double MetricGraph::diameter() const {
  // Upper bound: any two points are within half an edge of a vertex pair.
  double best = 0.0;
  for (double d : vertex_dist_) best = std::max(best, d);
  double longest = 0.0;
  for (const auto& e : edges_) longest = std::max(longest, e.length);
  return best + longest;
}

std::optional<VertexIndex> MetricGraph::find_vertex(const std::string& name) const {
  auto it = vertex_lookup_.find(name);
  if (it == vertex_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeIndex> MetricGraph::find_edge(const std::string& id) const {
  auto it = edge_lookup_.find(id);
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

GraphPoint MetricGraph::vertex_point(VertexIndex v) const {
  if (v >= num_vertices()) throw Error(ErrorCode::kInvalidArgument, "vertex index out of range");
  return GraphPoint::vertex(v);
}

GraphPoint MetricGraph::edge_point(EdgeIndex e, double offset) const {
  const Edge& edge = edges_.at(e);
  if (!std::isfinite(offset) || offset < -kSnapTolerance || offset > edge.length + kSnapTolerance)
    throw Error(ErrorCode::kInvalidArgument,
                "offset " + std::to_string(offset) + " outside edge '" + edge.id + "'");
  if (offset <= kSnapTolerance) return GraphPoint::vertex(edge.u);
  if (offset >= edge.length - kSnapTolerance) return GraphPoint::vertex(edge.v);
  return GraphPoint(false, e, offset);
}

bool MetricGraph::on_edge(const GraphPoint& p, EdgeIndex e) const {
  if (p.is_vertex()) return edges_[e].u == p.vertex_index() || edges_[e].v == p.vertex_index();
  return p.edge_index() == e;
}

double MetricGraph::offset_on(const GraphPoint& p, EdgeIndex e) const {
  const Edge& edge = edges_[e];
  if (!p.is_vertex()) {
    if (p.edge_index() != e) throw Error(ErrorCode::kInvalidArgument, "point does not lie on edge '" + edge.id + "'");
    return p.offset();
  }
  if (p.vertex_index() == edge.u) return 0.0;
  if (p.vertex_index() == edge.v) return edge.length;
  throw Error(ErrorCode::kInvalidArgument, "vertex does not lie on edge '" + edge.id + "'");
}

VertexIndex MetricGraph::tail(const OrientedEdge& oe) const {
  return oe.reversed ? edges_.at(oe.edge).v : edges_.at(oe.edge).u;
}

VertexIndex MetricGraph::head(const OrientedEdge& oe) const {
  return oe.reversed ? edges_.at(oe.edge).u : edges_.at(oe.edge).v;
}

double MetricGraph::offset_on(const GraphPoint& p, const OrientedEdge& oe) const {
  double s = offset_on(p, oe.edge);
  return oe.reversed ? edges_[oe.edge].length - s : s;
}

GraphPoint MetricGraph::oriented_point(const OrientedEdge& oe, double offset) const {
  const double l = edges_.at(oe.edge).length;
  return edge_point(oe.edge, oe.reversed ? l - offset : offset);
}

MetricGraph::Exits MetricGraph::exits(const GraphPoint& p) const {
  if (p.is_vertex()) return Exits{{Exit{p.vertex_index(), 0.0}, Exit{}}, 1};
  const Edge& e = edges_[p.edge_index()];
  return Exits{{Exit{e.u, p.offset()}, Exit{e.v, e.length - p.offset()}}, 2};
}

double MetricGraph::distance(const GraphPoint& x, const GraphPoint& y) const {
  if (x == y) return 0.0;
  double best = kInf;
  if (!x.is_vertex() && !y.is_vertex() && x.edge_index() == y.edge_index())
    best = std::abs(x.offset() - y.offset());
  const Exits xs = exits(x);
  const Exits ys = exits(y);
  for (std::size_t i = 0; i < xs.count; ++i) {
    for (std::size_t j = 0; j < ys.count; ++j) {
      const Exit& ex = xs.items[i];
      const Exit& ey = ys.items[j];
      // Summation order is independent of argument order so d(x,y) == d(y,x).
      double lo = std::min(ex.length, ey.length);
      double hi = std::max(ex.length, ey.length);
      best = std::min(best, (lo + hi) + vertex_distance(ex.vertex, ey.vertex));
    }
  }
  return best;
}

GeodesicPath MetricGraph::shortest_path(const GraphPoint& x, const GraphPoint& y) const {
  GeodesicPath path;
  path.waypoints.push_back(x);
  const double total = distance(x, y);
  const double tol = 1e-12 * std::max(1.0, total);

  struct Move {
    EdgeIndex edge;
    bool forward;
    double from;
    double to;
    GraphPoint target;
  };

  GraphPoint cur = x;
  double remaining = total;
  while (!(cur == y)) {
    std::vector<Move> moves;
    auto add_moves_along = [&](EdgeIndex e, double from, bool allow_forward, bool allow_backward) {
      const Edge& edge = edges_[e];
      const bool y_here = !y.is_vertex() && y.edge_index() == e;
      if (allow_forward) {
        if (y_here && y.offset() > from)
          moves.push_back({e, true, from, y.offset(), y});
        else
          moves.push_back({e, true, from, edge.length, GraphPoint::vertex(edge.v)});
      }
      if (allow_backward) {
        if (y_here && y.offset() < from)
          moves.push_back({e, false, from, y.offset(), y});
        else
          moves.push_back({e, false, from, 0.0, GraphPoint::vertex(edge.u)});
      }
    };
    if (cur.is_vertex()) {
      for (EdgeIndex e : adjacency_[cur.vertex_index()]) {
        const bool from_u = edges_[e].u == cur.vertex_index();
        add_moves_along(e, from_u ? 0.0 : edges_[e].length, from_u, !from_u);
      }
    } else {
      add_moves_along(cur.edge_index(), cur.offset(), true, true);
    }
    std::sort(moves.begin(), moves.end(), [&](const Move& a, const Move& b) {
      const std::string& ia = edges_[a.edge].id;
      const std::string& ib = edges_[b.edge].id;
      if (ia != ib) return ia < ib;
      return a.forward && !b.forward;
    });

    bool advanced = false;
    for (const Move& m : moves) {
      const double step = std::abs(m.to - m.from);
      if (step + distance(m.target, y) <= remaining + tol) {
        path.segments.push_back(PathSegment{m.edge, m.forward, m.from, m.to});
        path.waypoints.push_back(m.target);
        path.length += step;
        cur = m.target;
        remaining = distance(cur, y);
        advanced = true;
        break;
      }
    }
    if (!advanced) throw Error(ErrorCode::kSolverError, "shortest_path failed to make progress");
  }
  return path;
}

bool MetricGraph::is_edge_minimizing(EdgeIndex e) const {
  const Edge& edge = edges_.at(e);
  return vertex_distance(edge.u, edge.v) >= edge.length;
}

bool MetricGraph::all_edges_minimizing() const {
  for (EdgeIndex e = 0; e < edges_.size(); ++e)
    if (!is_edge_minimizing(e)) return false;
  return true;
}

std::vector<GraphPoint> MetricGraph::cut_points_from(VertexIndex v) const {
  std::vector<GraphPoint> out;
  for (EdgeIndex f = 0; f < edges_.size(); ++f) {
    const Edge& edge = edges_[f];
    const double da = vertex_distance(v, edge.u);
    const double db = vertex_distance(v, edge.v);
    // Arrival through u at offset s costs da + s, through v costs db + l - s.
    const double s = 0.5 * (db + edge.length - da);
    if (s > kSnapTolerance && s < edge.length - kSnapTolerance) out.push_back(GraphPoint(false, f, s));
  }
  return out;
}

}  // namespace mgbary
