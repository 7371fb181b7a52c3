#pragma once

#include <cstdint>
#include <vector>

#include "qgraph/errors.hpp"

namespace qgraph {

/// One oriented edge. Orientation is the order the endpoints were given in;
/// tail and head of a loop coincide but the edge still has two distinct ends.
struct Edge {
  int tail = 0;
  int head = 0;
};

/// Connected multigraph. Loops and parallel edges are allowed; a loop
/// contributes 2 to the degree of its vertex.
class Graph {
 public:
  Graph() = default;
  Graph(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<size_t>(e)]; }
  bool is_loop(int e) const { return edges_[static_cast<size_t>(e)].tail == edges_[static_cast<size_t>(e)].head; }

  int degree(int v) const;

  /// First Betti number #E - #V + 1 (the graph is connected by construction).
  int betti_number() const;

  bool is_bipartite() const;

  /// True when every vertex has degree exactly 2, i.e. |G| is a circle.
  bool is_circle() const;

 private:
  int vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> degree_;
};

/// Validates ids, rejects an empty edge list, requires connectivity.
Graph build_graph(int vertex_count, const std::vector<Edge>& edges);

/// Graph plus positive edge lengths, index-aligned with graph.edges().
struct MetricGraph {
  Graph graph;
  std::vector<double> lengths;

  double total_length() const;
};

MetricGraph build_metric_graph(int vertex_count, const std::vector<Edge>& edges,
                               const std::vector<double>& lengths);

/// Reference to an original edge inside a merged edge: `reversed` means the
/// merged traversal runs against the original orientation.
struct EdgeRef {
  int edge = 0;
  bool reversed = false;
  bool operator==(const EdgeRef&) const = default;
};

struct SuppressResult {
  Graph graph;
  /// merged[new_e] lists the original edges composing new edge new_e, in
  /// traversal order from its tail to its head.
  std::vector<std::vector<EdgeRef>> merged;
  /// vertex_map[old_v] = new id, or -1 for suppressed vertices.
  std::vector<int> vertex_map;
};

/// Removes every degree-2 vertex by fusing its two incident edge ends.
/// A bare cycle collapses to the canonical one-vertex loop only when
/// `collapse_cycle_to_loop` is set; otherwise it is rejected.
SuppressResult suppress_degree_two(const Graph& g, bool collapse_cycle_to_loop = false);

/// Metric version: merged edges get the sum of their part lengths.
struct SuppressMetricResult {
  MetricGraph metric;
  std::vector<std::vector<EdgeRef>> merged;
  std::vector<int> vertex_map;
};
SuppressMetricResult suppress_degree_two(const MetricGraph& mg, bool collapse_cycle_to_loop = false);

struct ContractResult {
  Graph graph;
  /// vertex_map[old_v] = id of the merged vertex in the contracted graph.
  std::vector<int> vertex_map;
  /// kept[new_e] = original id of surviving edge new_e.
  std::vector<int> kept;
};

/// Identifies the endpoints of every edge in X (component-wise, so the result
/// does not depend on contraction order) and drops the edges of X.
ContractResult contract_edges(const Graph& g, const std::vector<int>& x);

enum class MinimalClass { star3, eight, cherry, circle, interval };

struct Reduction {
  MinimalClass cls;
  /// Edges to contract so that suppressing degree-2 vertices in G_X yields
  /// the minimal representative. Empty for circle and interval.
  std::vector<int> contracted;
};

/// Case split on the shape of |G|: circle, interval, tree with a branch
/// vertex (star3), b1 >= 2 (eight), or b1 == 1 and not a circle (cherry).
Reduction reduce_to_minimal(const Graph& g);

/// Candidate scar support: a simple cycle, or a simple path whose endpoints
/// have degree 1 in the ambient graph.
struct ScarSupport {
  enum class Kind { path, cycle };
  Kind kind = Kind::path;
  /// Edges in traversal order.
  std::vector<int> edge_seq;
  /// Visited vertices; for a cycle the first vertex is repeated at the end.
  std::vector<int> vertex_seq;
};

/// Enumerates all minimal supports. `budget` caps the number of extension
/// steps taken by the backtracking search.
std::vector<ScarSupport> minimal_scar_supports(const Graph& g, std::int64_t budget = 1'000'000);

}  // namespace qgraph
