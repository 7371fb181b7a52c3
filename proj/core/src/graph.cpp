#include "qgraph/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <string>

namespace qgraph {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Graph::Graph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ <= 0) throw InvalidVertexId("vertex count must be positive");
  if (edges_.empty()) throw EmptyEdgeList("graph needs at least one edge");
  for (const Edge& e : edges_) {
    if (e.tail < 0 || e.tail >= vertex_count_ || e.head < 0 || e.head >= vertex_count_)
      throw InvalidVertexId("edge endpoint " + std::to_string(e.tail) + "," +
                            std::to_string(e.head) + " outside [0," +
                            std::to_string(vertex_count_) + ")");
  }
  degree_.assign(static_cast<size_t>(vertex_count_), 0);
  UnionFind uf(vertex_count_);
  for (const Edge& e : edges_) {
    degree_[static_cast<size_t>(e.tail)] += 1;
    degree_[static_cast<size_t>(e.head)] += 1;
    uf.unite(e.tail, e.head);
  }
  for (int v = 1; v < vertex_count_; ++v)
    if (uf.find(v) != uf.find(0)) throw DisconnectedGraph("vertex " + std::to_string(v) + " unreachable");
}

int Graph::degree(int v) const {
  if (v < 0 || v >= vertex_count_) throw InvalidVertexId("degree of vertex " + std::to_string(v));
  return degree_[static_cast<size_t>(v)];
}

int Graph::betti_number() const { return edge_count() - vertex_count_ + 1; }

bool Graph::is_bipartite() const {
  std::vector<int> color(static_cast<size_t>(vertex_count_), -1);
  std::vector<std::vector<int>> nbr(static_cast<size_t>(vertex_count_));
  for (const Edge& e : edges_) {
    if (e.tail == e.head) return false;  // loop forces an odd closed walk
    nbr[static_cast<size_t>(e.tail)].push_back(e.head);
    nbr[static_cast<size_t>(e.head)].push_back(e.tail);
  }
  std::queue<int> q;
  color[0] = 0;
  q.push(0);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : nbr[static_cast<size_t>(v)]) {
      if (color[static_cast<size_t>(w)] == -1) {
        color[static_cast<size_t>(w)] = 1 - color[static_cast<size_t>(v)];
        q.push(w);
      } else if (color[static_cast<size_t>(w)] == color[static_cast<size_t>(v)]) {
        return false;
      }
    }
  }
  return true;
}

bool Graph::is_circle() const {
  for (int v = 0; v < vertex_count_; ++v)
    if (degree(v) != 2) return false;
  return true;
}

Graph build_graph(int vertex_count, const std::vector<Edge>& edges) {
  return Graph(vertex_count, edges);
}

double MetricGraph::total_length() const {
  double s = 0;
  for (double l : lengths) s += l;
  return s;
}

MetricGraph build_metric_graph(int vertex_count, const std::vector<Edge>& edges,
                               const std::vector<double>& lengths) {
  Graph g(vertex_count, edges);
  if (lengths.size() != edges.size())
    throw DimensionMismatch("expected " + std::to_string(edges.size()) + " lengths, got " +
                            std::to_string(lengths.size()));
  for (double l : lengths)
    if (!(l > 0)) throw InvalidInput("edge lengths must be positive");
  return MetricGraph{std::move(g), lengths};
}

namespace {

struct CurEdge {
  int tail;
  int head;
  std::vector<EdgeRef> parts;  // traversal order tail -> head
  int min_orig;
};

// Suppression works on a mutable edge list; vertices disappear as their two
// incident ends get fused.
SuppressResult suppress_impl(const Graph& g, bool collapse_cycle_to_loop) {
  const int v_count = g.vertex_count();
  std::vector<CurEdge> cur;
  cur.reserve(static_cast<size_t>(g.edge_count()));
  for (int e = 0; e < g.edge_count(); ++e)
    cur.push_back(CurEdge{g.edge(e).tail, g.edge(e).head, {EdgeRef{e, false}}, e});

  auto degrees = [&]() {
    std::vector<int> d(static_cast<size_t>(v_count), 0);
    for (const CurEdge& ce : cur) {
      d[static_cast<size_t>(ce.tail)] += 1;
      d[static_cast<size_t>(ce.head)] += 1;
    }
    return d;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> deg = degrees();
    for (int v = 0; v < v_count && !changed; ++v) {
      if (deg[static_cast<size_t>(v)] != 2) continue;
      // Locate the two ends at v. end: 0 = tail, 1 = head.
      std::vector<std::pair<size_t, int>> ends;
      for (size_t i = 0; i < cur.size(); ++i) {
        if (cur[i].tail == v) ends.emplace_back(i, 0);
        if (cur[i].head == v) ends.emplace_back(i, 1);
      }
      if (ends[0].first == ends[1].first) continue;  // loop vertex, nothing to fuse
      std::sort(ends.begin(), ends.end(), [&](auto a, auto b) {
        return std::make_pair(cur[a.first].min_orig, a.second) <
               std::make_pair(cur[b.first].min_orig, b.second);
      });
      const CurEdge& e1 = cur[ends[0].first];
      const CurEdge& e2 = cur[ends[1].first];
      CurEdge merged;
      // Traverse e1 into v, then e2 out of v.
      if (ends[0].second == 1) {
        merged.tail = e1.tail;
        merged.parts = e1.parts;
      } else {
        merged.tail = e1.head;
        for (auto it = e1.parts.rbegin(); it != e1.parts.rend(); ++it)
          merged.parts.push_back(EdgeRef{it->edge, !it->reversed});
      }
      if (ends[1].second == 0) {
        merged.head = e2.head;
        merged.parts.insert(merged.parts.end(), e2.parts.begin(), e2.parts.end());
      } else {
        merged.head = e2.tail;
        for (auto it = e2.parts.rbegin(); it != e2.parts.rend(); ++it)
          merged.parts.push_back(EdgeRef{it->edge, !it->reversed});
      }
      merged.min_orig = std::min(e1.min_orig, e2.min_orig);
      size_t i1 = ends[0].first, i2 = ends[1].first;
      if (i1 < i2) std::swap(i1, i2);
      cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(i1));
      cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(i2));
      cur.push_back(std::move(merged));
      changed = true;
    }
  }

  // Any remaining degree-2 vertex carries a single loop, which only happens
  // when the whole graph was a cycle.
  {
    std::vector<int> deg = degrees();
    for (int v = 0; v < v_count; ++v) {
      if (deg[static_cast<size_t>(v)] == 2 && !collapse_cycle_to_loop)
        throw InvalidInput("bare cycle collapses to a one-vertex loop; pass collapse_cycle_to_loop");
    }
  }

  std::sort(cur.begin(), cur.end(), [](const CurEdge& a, const CurEdge& b) { return a.min_orig < b.min_orig; });

  std::vector<int> deg = degrees();
  std::vector<int> vertex_map(static_cast<size_t>(v_count), -1);
  int next = 0;
  for (int v = 0; v < v_count; ++v)
    if (deg[static_cast<size_t>(v)] > 0) vertex_map[static_cast<size_t>(v)] = next++;

  std::vector<Edge> edges;
  std::vector<std::vector<EdgeRef>> merged;
  edges.reserve(cur.size());
  for (CurEdge& ce : cur) {
    edges.push_back(Edge{vertex_map[static_cast<size_t>(ce.tail)], vertex_map[static_cast<size_t>(ce.head)]});
    merged.push_back(std::move(ce.parts));
  }
  return SuppressResult{Graph(next, edges), std::move(merged), std::move(vertex_map)};
}

}  // namespace

SuppressResult suppress_degree_two(const Graph& g, bool collapse_cycle_to_loop) {
  return suppress_impl(g, collapse_cycle_to_loop);
}

SuppressMetricResult suppress_degree_two(const MetricGraph& mg, bool collapse_cycle_to_loop) {
  SuppressResult r = suppress_impl(mg.graph, collapse_cycle_to_loop);
  std::vector<double> lengths;
  lengths.reserve(r.merged.size());
  for (const auto& parts : r.merged) {
    double s = 0;
    for (const EdgeRef& p : parts) s += mg.lengths[static_cast<size_t>(p.edge)];
    lengths.push_back(s);
  }
  return SuppressMetricResult{MetricGraph{r.graph, std::move(lengths)}, std::move(r.merged),
                              std::move(r.vertex_map)};
}

ContractResult contract_edges(const Graph& g, const std::vector<int>& x) {
  std::vector<char> in_x(static_cast<size_t>(g.edge_count()), 0);
  for (int e : x) {
    if (e < 0 || e >= g.edge_count()) throw InvalidInput("contract: edge id " + std::to_string(e));
    in_x[static_cast<size_t>(e)] = 1;
  }
  int x_count = 0;
  for (char c : in_x) x_count += c;
  if (x_count == g.edge_count()) throw ContractAllEdges("cannot contract every edge");

  UnionFind uf(g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e)
    if (in_x[static_cast<size_t>(e)]) uf.unite(g.edge(e).tail, g.edge(e).head);

  std::vector<int> vertex_map(static_cast<size_t>(g.vertex_count()), -1);
  int next = 0;
  for (int v = 0; v < g.vertex_count(); ++v) {
    int r = uf.find(v);
    if (vertex_map[static_cast<size_t>(r)] == -1) vertex_map[static_cast<size_t>(r)] = next++;
    vertex_map[static_cast<size_t>(v)] = vertex_map[static_cast<size_t>(r)];
  }

  std::vector<Edge> edges;
  std::vector<int> kept;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (in_x[static_cast<size_t>(e)]) continue;
    edges.push_back(Edge{vertex_map[static_cast<size_t>(g.edge(e).tail)],
                         vertex_map[static_cast<size_t>(g.edge(e).head)]});
    kept.push_back(e);
  }
  return ContractResult{Graph(next, edges), std::move(vertex_map), std::move(kept)};
}

namespace {

// Deterministic DFS spanning tree: scan edges in ascending id order.
std::vector<char> spanning_tree(const Graph& g) {
  std::vector<char> in_tree(static_cast<size_t>(g.edge_count()), 0);
  UnionFind uf(g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    int a = g.edge(e).tail, b = g.edge(e).head;
    if (uf.find(a) != uf.find(b)) {
      uf.unite(a, b);
      in_tree[static_cast<size_t>(e)] = 1;
    }
  }
  return in_tree;
}

// Edges of the unique cycle of a connected graph with b1 == 1.
std::vector<int> unique_cycle(const Graph& g) {
  std::vector<char> in_tree = spanning_tree(g);
  int extra = -1;
  for (int e = 0; e < g.edge_count(); ++e)
    if (!in_tree[static_cast<size_t>(e)]) extra = e;
  if (g.is_loop(extra)) return {extra};
  // Tree path between the endpoints of the extra edge.
  std::vector<std::vector<std::pair<int, int>>> nbr(static_cast<size_t>(g.vertex_count()));
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!in_tree[static_cast<size_t>(e)]) continue;
    nbr[static_cast<size_t>(g.edge(e).tail)].emplace_back(g.edge(e).head, e);
    nbr[static_cast<size_t>(g.edge(e).head)].emplace_back(g.edge(e).tail, e);
  }
  int src = g.edge(extra).tail, dst = g.edge(extra).head;
  std::vector<int> via_edge(static_cast<size_t>(g.vertex_count()), -1);
  std::vector<int> parent(static_cast<size_t>(g.vertex_count()), -1);
  std::queue<int> q;
  q.push(src);
  parent[static_cast<size_t>(src)] = src;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (auto [w, e] : nbr[static_cast<size_t>(v)]) {
      if (parent[static_cast<size_t>(w)] != -1) continue;
      parent[static_cast<size_t>(w)] = v;
      via_edge[static_cast<size_t>(w)] = e;
      q.push(w);
    }
  }
  std::vector<int> cycle{extra};
  for (int v = dst; v != src; v = parent[static_cast<size_t>(v)])
    cycle.push_back(via_edge[static_cast<size_t>(v)]);
  return cycle;
}

}  // namespace

Reduction reduce_to_minimal(const Graph& g) {
  if (g.is_circle()) return Reduction{MinimalClass::circle, {}};
  const int b1 = g.betti_number();

  if (b1 == 0) {
    int branch = -1;
    for (int v = 0; v < g.vertex_count() && branch == -1; ++v)
      if (g.degree(v) >= 3) branch = v;
    if (branch == -1) return Reduction{MinimalClass::interval, {}};
    // Keep the first three edges at the branch vertex, contract the rest.
    std::vector<int> keep;
    for (int e = 0; e < g.edge_count() && keep.size() < 3; ++e)
      if (g.edge(e).tail == branch || g.edge(e).head == branch) keep.push_back(e);
    std::vector<int> x;
    for (int e = 0; e < g.edge_count(); ++e)
      if (std::find(keep.begin(), keep.end(), e) == keep.end()) x.push_back(e);
    return Reduction{MinimalClass::star3, std::move(x)};
  }

  if (b1 >= 2) {
    // Contract a spanning tree plus all surplus independent cycles; the two
    // surviving edges become loops at the single merged vertex.
    std::vector<char> in_tree = spanning_tree(g);
    std::vector<int> x;
    int kept_nontree = 0;
    for (int e = 0; e < g.edge_count(); ++e) {
      if (in_tree[static_cast<size_t>(e)]) {
        x.push_back(e);
      } else if (kept_nontree < 2) {
        ++kept_nontree;
      } else {
        x.push_back(e);
      }
    }
    return Reduction{MinimalClass::eight, std::move(x)};
  }

  // b1 == 1 and not a circle: keep the unique cycle plus one path from the
  // cycle into the hanging forest down to a leaf.
  std::vector<int> cycle = unique_cycle(g);
  std::vector<char> on_cycle_edge(static_cast<size_t>(g.edge_count()), 0);
  for (int e : cycle) on_cycle_edge[static_cast<size_t>(e)] = 1;
  std::vector<char> on_cycle_vertex(static_cast<size_t>(g.vertex_count()), 0);
  for (int e : cycle) {
    on_cycle_vertex[static_cast<size_t>(g.edge(e).tail)] = 1;
    on_cycle_vertex[static_cast<size_t>(g.edge(e).head)] = 1;
  }
  int w = -1;
  int first_out = -1;
  for (int e = 0; e < g.edge_count() && w == -1; ++e) {
    if (on_cycle_edge[static_cast<size_t>(e)]) continue;
    if (on_cycle_vertex[static_cast<size_t>(g.edge(e).tail)]) {
      w = g.edge(e).tail;
      first_out = e;
    } else if (on_cycle_vertex[static_cast<size_t>(g.edge(e).head)]) {
      w = g.edge(e).head;
      first_out = e;
    }
  }
  std::vector<char> keep(static_cast<size_t>(g.edge_count()), 0);
  for (int e : cycle) keep[static_cast<size_t>(e)] = 1;
  // Walk into the forest until a leaf of g.
  int cur_edge = first_out;
  int cur_vertex = (g.edge(first_out).tail == w) ? g.edge(first_out).head : g.edge(first_out).tail;
  keep[static_cast<size_t>(first_out)] = 1;
  while (g.degree(cur_vertex) > 1) {
    for (int e = 0; e < g.edge_count(); ++e) {
      if (e == cur_edge || keep[static_cast<size_t>(e)]) continue;
      if (g.edge(e).tail == cur_vertex || g.edge(e).head == cur_vertex) {
        keep[static_cast<size_t>(e)] = 1;
        cur_vertex = (g.edge(e).tail == cur_vertex) ? g.edge(e).head : g.edge(e).tail;
        cur_edge = e;
        break;
      }
    }
  }
  std::vector<int> x;
  for (int e = 0; e < g.edge_count(); ++e)
    if (!keep[static_cast<size_t>(e)]) x.push_back(e);
  return Reduction{MinimalClass::cherry, std::move(x)};
}

namespace {

struct Enumerator {
  const Graph& g;
  std::int64_t budget;
  std::int64_t steps = 0;
  std::vector<std::vector<std::pair<int, int>>> incident;  // vertex -> (edge, other endpoint)
  std::vector<ScarSupport> out;

  explicit Enumerator(const Graph& graph, std::int64_t b) : g(graph), budget(b) {
    incident.resize(static_cast<size_t>(g.vertex_count()));
    for (int e = 0; e < g.edge_count(); ++e) {
      incident[static_cast<size_t>(g.edge(e).tail)].emplace_back(e, g.edge(e).head);
      if (!g.is_loop(e)) incident[static_cast<size_t>(g.edge(e).head)].emplace_back(e, g.edge(e).tail);
    }
    for (auto& v : incident) std::sort(v.begin(), v.end());
  }

  void step() {
    if (++steps > budget)
      throw EnumerationBudgetExceeded("support enumeration exceeded " + std::to_string(budget) + " steps");
  }

  // Simple cycles through vertices >= s, rooted at s. Direction is fixed by
  // requiring the first edge id to be smaller than the last.
  void cycles_from(int s, int v, std::vector<char>& used_v, std::vector<char>& used_e,
                   std::vector<int>& edge_seq, std::vector<int>& vertex_seq) {
    for (auto [e, w] : incident[static_cast<size_t>(v)]) {
      if (g.is_loop(e) || used_e[static_cast<size_t>(e)] || w < s) continue;
      step();
      if (w == s) {
        if (edge_seq.size() >= 1 && edge_seq.front() < e) {
          ScarSupport sup;
          sup.kind = ScarSupport::Kind::cycle;
          sup.edge_seq = edge_seq;
          sup.edge_seq.push_back(e);
          sup.vertex_seq = vertex_seq;
          sup.vertex_seq.push_back(s);
          out.push_back(std::move(sup));
        }
        continue;
      }
      if (used_v[static_cast<size_t>(w)]) continue;
      used_v[static_cast<size_t>(w)] = 1;
      used_e[static_cast<size_t>(e)] = 1;
      edge_seq.push_back(e);
      vertex_seq.push_back(w);
      cycles_from(s, w, used_v, used_e, edge_seq, vertex_seq);
      edge_seq.pop_back();
      vertex_seq.pop_back();
      used_e[static_cast<size_t>(e)] = 0;
      used_v[static_cast<size_t>(w)] = 0;
    }
  }

  void paths_from(int target, int v, std::vector<char>& used_v, std::vector<int>& edge_seq,
                  std::vector<int>& vertex_seq) {
    for (auto [e, w] : incident[static_cast<size_t>(v)]) {
      if (g.is_loop(e)) continue;
      step();
      if (w == target) {
        ScarSupport sup;
        sup.kind = ScarSupport::Kind::path;
        sup.edge_seq = edge_seq;
        sup.edge_seq.push_back(e);
        sup.vertex_seq = vertex_seq;
        sup.vertex_seq.push_back(w);
        out.push_back(std::move(sup));
        continue;
      }
      if (used_v[static_cast<size_t>(w)]) continue;
      used_v[static_cast<size_t>(w)] = 1;
      edge_seq.push_back(e);
      vertex_seq.push_back(w);
      paths_from(target, w, used_v, edge_seq, vertex_seq);
      edge_seq.pop_back();
      vertex_seq.pop_back();
      used_v[static_cast<size_t>(w)] = 0;
    }
  }
};

}  // namespace

std::vector<ScarSupport> minimal_scar_supports(const Graph& g, std::int64_t budget) {
  Enumerator en(g, budget);

  for (int e = 0; e < g.edge_count(); ++e) {
    if (!g.is_loop(e)) continue;
    ScarSupport sup;
    sup.kind = ScarSupport::Kind::cycle;
    sup.edge_seq = {e};
    sup.vertex_seq = {g.edge(e).tail, g.edge(e).tail};
    en.out.push_back(std::move(sup));
  }
  for (int s = 0; s < g.vertex_count(); ++s) {
    std::vector<char> used_v(static_cast<size_t>(g.vertex_count()), 0);
    std::vector<char> used_e(static_cast<size_t>(g.edge_count()), 0);
    std::vector<int> edge_seq;
    std::vector<int> vertex_seq{s};
    used_v[static_cast<size_t>(s)] = 1;
    en.cycles_from(s, s, used_v, used_e, edge_seq, vertex_seq);
  }
  for (int u = 0; u < g.vertex_count(); ++u) {
    if (g.degree(u) != 1) continue;
    for (int v = u + 1; v < g.vertex_count(); ++v) {
      if (g.degree(v) != 1) continue;
      std::vector<char> used_v(static_cast<size_t>(g.vertex_count()), 0);
      std::vector<int> edge_seq;
      std::vector<int> vertex_seq{u};
      used_v[static_cast<size_t>(u)] = 1;
      en.paths_from(v, u, used_v, edge_seq, vertex_seq);
    }
  }

  std::sort(en.out.begin(), en.out.end(), [](const ScarSupport& a, const ScarSupport& b) {
    if (a.kind != b.kind) return a.kind == ScarSupport::Kind::cycle;
    std::vector<int> ea = a.edge_seq, eb = b.edge_seq;
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    return ea < eb;
  });
  return en.out;
}

}  // namespace qgraph
