// Independent brute-force oracles for the solver test suites. Everything in
// here recomputes answers from first principles (set materialization,
// exhaustive enumeration, closures, dense linear algebra) and must stay
// decoupled from the implementation paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "graphpipe/graph.hpp"

namespace oracles {

using graphpipe::Edge;
using graphpipe::Graph;
using graphpipe::NodeId;

struct EdgeDiff {
  std::size_t added = 0;
  std::size_t removed = 0;
};

/// Set-difference edit distance: materialize both edge sets and count
/// membership per direction.
inline EdgeDiff edit_distance(const Graph& g, const Graph& h) {
  auto materialize = [](const Graph& graph) {
    std::set<std::pair<NodeId, NodeId>> out;
    for (const Edge& e : graph.edges()) {
      NodeId u = e.u, v = e.v;
      if (!graph.directed() && u > v) std::swap(u, v);
      out.insert({u, v});
    }
    return out;
  };
  auto ge = materialize(g);
  auto he = materialize(h);
  EdgeDiff diff;
  for (const auto& e : he) {
    if (!ge.count(e)) ++diff.added;
  }
  for (const auto& e : ge) {
    if (!he.count(e)) ++diff.removed;
  }
  return diff;
}

/// Dense adjacency over node positions; [i][j] true iff arc i->j (both
/// directions for undirected graphs).
inline std::vector<std::vector<bool>> adjacency(const Graph& g) {
  std::size_t n = g.node_count();
  std::map<NodeId, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[g.nodes()[i]] = i;
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const Edge& e : g.edges()) {
    adj[pos.at(e.u)][pos.at(e.v)] = true;
    if (!g.directed()) adj[pos.at(e.v)][pos.at(e.u)] = true;
  }
  return adj;
}

inline std::size_t position(const Graph& g, NodeId id) {
  return static_cast<std::size_t>(
      std::lower_bound(g.nodes().begin(), g.nodes().end(), id) -
      g.nodes().begin());
}

// ---- structural queries: naive scans over the raw edge list ----

inline bool edge_exists(const Graph& g, NodeId u, NodeId v) {
  for (const Edge& e : g.edges()) {
    if (e.u == u && e.v == v) return true;
    if (!g.directed() && e.u == v && e.v == u) return true;
  }
  return false;
}

inline bool node_exists(const Graph& g, NodeId id) {
  for (NodeId n : g.nodes()) {
    if (n == id) return true;
  }
  return false;
}

inline std::int64_t degree(const Graph& g, NodeId v) {
  std::int64_t count = 0;
  for (const Edge& e : g.edges()) {
    if (e.u == v) ++count;
    if (e.v == v) ++count;
  }
  return count;  // directed: in+out; undirected: incident edges
}

// ---- union-find ----

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

/// Undirected cycle test: some component has at least as many edges as
/// nodes.
inline bool has_cycle_undirected(const Graph& g) {
  std::size_t n = g.node_count();
  UnionFind uf(n);
  for (const Edge& e : g.edges()) {
    uf.unite(position(g, e.u), position(g, e.v));
  }
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> stats;  // nodes, edges
  for (std::size_t i = 0; i < n; ++i) ++stats[uf.find(i)].first;
  for (const Edge& e : g.edges()) ++stats[uf.find(position(g, e.u))].second;
  for (const auto& [root, s] : stats) {
    if (s.second >= s.first) return true;
  }
  return false;
}

inline std::int64_t component_count(const Graph& g) {
  std::size_t n = g.node_count();
  UnionFind uf(n);
  for (const Edge& e : g.edges()) {
    uf.unite(position(g, e.u), position(g, e.v));
  }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) roots.insert(uf.find(i));
  return static_cast<std::int64_t>(roots.size());
}

/// Exhaustive unordered-triple triangle count (symmetrized adjacency).
inline std::int64_t triangle_count(const Graph& g) {
  auto adj = adjacency(g);
  std::size_t n = adj.size();
  auto linked = [&](std::size_t a, std::size_t b) {
    return adj[a][b] || adj[b][a];
  };
  std::int64_t count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        if (linked(a, b) && linked(b, c) && linked(a, c)) ++count;
      }
    }
  }
  return count;
}

/// Reachability via repeated boolean matrix product.
inline std::vector<std::vector<bool>> transitive_closure(const Graph& g) {
  auto reach = adjacency(g);
  std::size_t n = reach.size();
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
  for (bool changed = true; changed;) {
    changed = false;
    auto next = reach;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!reach[i][k]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (reach[k][j] && !next[i][j]) {
            next[i][j] = true;
            changed = true;
          }
        }
      }
    }
    reach = std::move(next);
  }
  return reach;
}

/// Directed cycle test via the closure: some node reaches itself through at
/// least one arc.
inline bool has_cycle_directed(const Graph& g) {
  std::size_t n = g.node_count();
  auto adj = adjacency(g);
  auto reach = adj;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!reach[i][k]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (reach[k][j] && !reach[i][j]) {
            reach[i][j] = true;
            changed = true;
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i][i]) return true;
  }
  return false;
}

/// All-pairs shortest distances by Floyd-Warshall over effective weights.
inline std::vector<std::vector<double>> floyd_warshall(const Graph& g) {
  std::size_t n = g.node_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) dist[i][i] = 0;
  for (const Edge& e : g.edges()) {
    double w = e.w ? *e.w : 1.0;
    std::size_t a = position(g, e.u), b = position(g, e.v);
    dist[a][b] = std::min(dist[a][b], w);
    if (!g.directed()) dist[b][a] = std::min(dist[b][a], w);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (dist[i][k] + dist[k][j] < dist[i][j]) {
          dist[i][j] = dist[i][k] + dist[k][j];
        }
      }
    }
  }
  return dist;
}

/// Max flow as the minimum over all s-t cuts, enumerating every subset of
/// the other nodes (2^(n-2) cuts).
inline double min_cut(const Graph& g, NodeId s, NodeId t) {
  std::size_t n = g.node_count();
  std::size_t sp = position(g, s), tp = position(g, t);
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != sp && i != tp) others.push_back(i);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (1ULL << others.size()); ++mask) {
    std::vector<bool> in_s(n, false);
    in_s[sp] = true;
    for (std::size_t b = 0; b < others.size(); ++b) {
      if (mask & (1ULL << b)) in_s[others[b]] = true;
    }
    double capacity = 0;
    for (const Edge& e : g.edges()) {
      double w = e.w ? *e.w : 1.0;
      std::size_t a = position(g, e.u), b = position(g, e.v);
      if (in_s[a] && !in_s[b]) capacity += w;
      if (!g.directed() && in_s[b] && !in_s[a]) capacity += w;
    }
    best = std::min(best, capacity);
  }
  return best;
}

/// Largest k with a non-empty k-core, by subset search over bitmask
/// adjacency (n <= 20).
inline std::int64_t max_core(const Graph& g) {
  std::size_t n = g.node_count();
  std::vector<std::uint64_t> adj_bits(n, 0);
  for (const Edge& e : g.edges()) {
    std::size_t a = position(g, e.u), b = position(g, e.v);
    adj_bits[a] |= 1ULL << b;
    adj_bits[b] |= 1ULL << a;
  }
  std::int64_t best = 0;
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    std::int64_t min_degree = std::numeric_limits<std::int64_t>::max();
    for (std::size_t v = 0; v < n; ++v) {
      if (!(mask & (1ULL << v))) continue;
      min_degree = std::min<std::int64_t>(
          min_degree, __builtin_popcountll(adj_bits[v] & mask));
    }
    best = std::max(best, min_degree);
  }
  return best;
}

inline bool arc_exists(const Graph& g, NodeId u, NodeId v) {
  for (const Edge& e : g.edges()) {
    if (e.u == u && e.v == v) return true;
  }
  return false;
}

/// Common out-neighbors / undirected neighbors by double membership loop.
inline std::int64_t common_neighbors(const Graph& g, NodeId u, NodeId v,
                                     bool undirected) {
  std::int64_t count = 0;
  for (NodeId w : g.nodes()) {
    bool from_u = undirected ? (edge_exists(g, u, w) || edge_exists(g, w, u))
                             : arc_exists(g, u, w);
    bool from_v = undirected ? (edge_exists(g, v, w) || edge_exists(g, w, v))
                             : arc_exists(g, v, w);
    if (from_u && from_v) ++count;
  }
  return count;
}

/// Clustering coefficient by a quadratic neighbor-pair scan.
inline double clustering(const Graph& g, NodeId v) {
  std::vector<NodeId> nbs;
  for (NodeId w : g.nodes()) {
    if (w == v) continue;
    if (edge_exists(g, v, w) || edge_exists(g, w, v)) nbs.push_back(w);
  }
  if (nbs.size() < 2) return 0.0;
  std::int64_t links = 0;
  for (std::size_t i = 0; i < nbs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbs.size(); ++j) {
      if (edge_exists(g, nbs[i], nbs[j]) || edge_exists(g, nbs[j], nbs[i])) {
        ++links;
      }
    }
  }
  return 2.0 * static_cast<double>(links) /
         (static_cast<double>(nbs.size()) *
          static_cast<double>(nbs.size() - 1));
}

/// PageRank by dense linear solve of (I - d*A) p = (1-d)/n * 1, where
/// column j of A spreads rank over out-neighbors (uniformly over all nodes
/// when j dangles). Gaussian elimination with partial pivoting.
inline std::vector<double> pagerank_linear(const Graph& g, double damping) {
  std::size_t n = g.node_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<std::size_t> out_degree(n, 0);
  for (const Edge& e : g.edges()) {
    ++out_degree[position(g, e.u)];
    if (!g.directed()) ++out_degree[position(g, e.v)];
  }
  for (const Edge& e : g.edges()) {
    std::size_t from = position(g, e.u), to = position(g, e.v);
    a[to][from] += 1.0 / static_cast<double>(out_degree[from]);
    if (!g.directed()) {
      a[from][to] += 1.0 / static_cast<double>(out_degree[to]);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (out_degree[j] == 0) {
      for (std::size_t i = 0; i < n; ++i) {
        a[i][j] = 1.0 / static_cast<double>(n);
      }
    }
  }

  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, (1.0 - damping) / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = (i == j ? 1.0 : 0.0) - damping * a[i][j];
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      double factor = m[row][col] / m[col][col];
      for (std::size_t j = col; j < n; ++j) m[row][j] -= factor * m[col][j];
      rhs[row] -= factor * rhs[col];
    }
  }
  std::vector<double> p(n, 0.0);
  for (std::size_t row = n; row-- > 0;) {
    double acc = rhs[row];
    for (std::size_t j = row + 1; j < n; ++j) acc -= m[row][j] * p[j];
    p[row] = acc / m[row][row];
  }
  return p;
}

}  // namespace oracles
