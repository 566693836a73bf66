#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgbary/error.hpp"

namespace mgbary {

using VertexIndex = std::size_t;
using EdgeIndex = std::size_t;

// Offsets closer than this to an edge end are identified with the vertex.
inline constexpr double kSnapTolerance = 1e-12;

struct EdgeSpec {
  std::string id;
  std::string u;
  std::string v;
  double length = 0.0;
};

struct GraphDescription {
  std::vector<std::string> vertices;
  std::vector<EdgeSpec> edges;
};

struct Edge {
  std::string id;
  VertexIndex u = 0;
  VertexIndex v = 0;
  double length = 0.0;
};

// A point of the graph in canonical form: either a vertex, or an edge index
// with an offset strictly inside (0, length) measured from the edge's u end.
// Use MetricGraph::vertex_point / edge_point to obtain canonical values.
class GraphPoint {
 public:
  GraphPoint() = default;

  static GraphPoint vertex(VertexIndex v) { return GraphPoint(true, v, 0.0); }

  bool is_vertex() const noexcept { return is_vertex_; }
  VertexIndex vertex_index() const noexcept { return index_; }
  EdgeIndex edge_index() const noexcept { return index_; }
  double offset() const noexcept { return offset_; }

  friend bool operator==(const GraphPoint&, const GraphPoint&) = default;
  // Vertices order before edge points; then by index, then offset.
  friend std::strong_ordering operator<=>(const GraphPoint& a, const GraphPoint& b) {
    if (a.is_vertex_ != b.is_vertex_) return a.is_vertex_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.index_ != b.index_) return a.index_ <=> b.index_;
    if (a.offset_ < b.offset_) return std::strong_ordering::less;
    if (a.offset_ > b.offset_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  friend class MetricGraph;
  GraphPoint(bool is_vertex, std::size_t index, double offset)
      : is_vertex_(is_vertex), index_(index), offset_(offset) {}

  bool is_vertex_ = true;
  std::size_t index_ = 0;
  double offset_ = 0.0;
};

// An edge traversed in a chosen direction. Offsets along an oriented edge are
// measured from its tail.
struct OrientedEdge {
  EdgeIndex edge = 0;
  bool reversed = false;

  friend bool operator==(const OrientedEdge&, const OrientedEdge&) = default;
};

struct PathSegment {
  EdgeIndex edge = 0;
  bool forward = true;  // direction of increasing offset (u to v)
  double from_offset = 0.0;
  double to_offset = 0.0;

  double length() const { return forward ? to_offset - from_offset : from_offset - to_offset; }
};

struct GeodesicPath {
  std::vector<GraphPoint> waypoints;  // start, every vertex crossed, end
  std::vector<PathSegment> segments;
  double length = 0.0;
};

class MetricGraph {
 public:
  std::size_t num_vertices() const { return vertex_names_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const std::string& vertex_name(VertexIndex v) const { return vertex_names_.at(v); }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<EdgeIndex>& incident_edges(VertexIndex v) const { return adjacency_.at(v); }

  // Smallest edge length (the uniform lower bound c).
  double min_edge_length() const { return min_length_; }
  double diameter() const;

  std::optional<VertexIndex> find_vertex(const std::string& name) const;
  std::optional<EdgeIndex> find_edge(const std::string& id) const;

  GraphPoint vertex_point(VertexIndex v) const;
  // Canonicalizes; offsets within kSnapTolerance of an end become vertices.
  // Throws Error(kInvalidArgument) for offsets outside [0, length].
  GraphPoint edge_point(EdgeIndex e, double offset) const;

  // Whether p lies on the closed edge e.
  bool on_edge(const GraphPoint& p, EdgeIndex e) const;
  // Offset of p along e measured from u; p must lie on the closed edge.
  double offset_on(const GraphPoint& p, EdgeIndex e) const;

  VertexIndex tail(const OrientedEdge& oe) const;
  VertexIndex head(const OrientedEdge& oe) const;
  double offset_on(const GraphPoint& p, const OrientedEdge& oe) const;
  GraphPoint oriented_point(const OrientedEdge& oe, double offset) const;

  double vertex_distance(VertexIndex a, VertexIndex b) const { return vertex_dist_[a * num_vertices() + b]; }
  double distance(const GraphPoint& x, const GraphPoint& y) const;
  GeodesicPath shortest_path(const GraphPoint& x, const GraphPoint& y) const;

  bool is_edge_minimizing(EdgeIndex e) const;
  bool all_edges_minimizing() const;

  // Interior points of edges reached from v by two geodesics leaving the
  // edge through different endpoints; at most one per edge, ordered by edge.
  std::vector<GraphPoint> cut_points_from(VertexIndex v) const;

 private:
  friend MetricGraph build_graph(const GraphDescription& spec);

  struct Exit {
    VertexIndex vertex = 0;
    double length = 0.0;
  };
  // Ends through which a geodesic can leave p (one for a vertex, two otherwise).
  struct Exits {
    std::array<Exit, 2> items;
    std::size_t count;
  };
  Exits exits(const GraphPoint& p) const;

  std::vector<std::string> vertex_names_;
  std::unordered_map<std::string, VertexIndex> vertex_lookup_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, EdgeIndex> edge_lookup_;
  std::vector<std::vector<EdgeIndex>> adjacency_;
  std::vector<double> vertex_dist_;  // row-major all-pairs distances
  double min_length_ = 0.0;
};

// Validates and builds a metric graph. Throws GraphError with a distinct
// GraphDefect for each kind of invalid input.
MetricGraph build_graph(const GraphDescription& spec);

}  // namespace mgbary
