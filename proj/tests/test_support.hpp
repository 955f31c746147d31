#pragma once

#include <string>
#include <vector>

#include "graphpipe/common.hpp"
#include "graphpipe/graph.hpp"

namespace testsupport {

using graphpipe::Edge;
using graphpipe::Graph;
using graphpipe::NodeId;
using graphpipe::Rng;

struct RandomGraphSpec {
  std::size_t max_nodes = 12;
  std::size_t min_nodes = 2;
  double edge_prob = 0.3;
  bool directed = false;
  bool weighted = false;
  bool half_integer_weights = true;  // dyadic values keep float sums exact
};

inline Graph random_graph(Rng& rng, const RandomGraphSpec& spec = {}) {
  std::size_t n = spec.min_nodes +
                  rng.below(spec.max_nodes - spec.min_nodes + 1);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = spec.directed ? 0 : u + 1; v < n; ++v) {
      if (u == v) continue;
      if (!rng.chance(spec.edge_prob)) continue;
      Edge e{u, v, std::nullopt};
      if (spec.weighted) {
        e.w = spec.half_integer_weights
                  ? 0.5 * static_cast<double>(rng.range(1, 20))
                  : static_cast<double>(rng.range(1, 10));
      }
      edges.push_back(e);
    }
  }
  std::vector<NodeId> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<NodeId>(i);
  return graphpipe::build_graph(edges, spec.directed, all);
}

inline std::vector<Edge> random_edge_sequence(Rng& rng, std::size_t count,
                                              bool weighted,
                                              NodeId max_id = 40) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < count; ++i) {
    NodeId u = static_cast<NodeId>(rng.below(max_id));
    NodeId v = static_cast<NodeId>(rng.below(max_id));
    while (v == u) v = static_cast<NodeId>(rng.below(max_id));
    Edge e{u, v, std::nullopt};
    if (weighted) e.w = 0.5 * static_cast<double>(rng.range(1, 20));
    edges.push_back(e);
  }
  return edges;
}

/// Dense connected ring-plus-chords graph, handy for ingest tests needing
/// an exact edge count.
inline Graph ring_graph(std::size_t nodes, std::size_t extra_chords,
                        std::uint64_t seed, bool weighted = false) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < nodes; ++i) {
    Edge e{i, static_cast<NodeId>((i + 1) % nodes), std::nullopt};
    if (e.u > e.v) std::swap(e.u, e.v);
    if (weighted) e.w = static_cast<double>(rng.range(1, 10));
    edges.push_back(e);
  }
  std::size_t added = 0;
  while (added < extra_chords) {
    NodeId u = static_cast<NodeId>(rng.below(nodes));
    NodeId v = static_cast<NodeId>(rng.below(nodes));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    bool dup = false;
    for (const Edge& e : edges) {
      if (e.u == u && e.v == v) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    Edge e{u, v, std::nullopt};
    if (weighted) e.w = static_cast<double>(rng.range(1, 10));
    edges.push_back(e);
    ++added;
  }
  return graphpipe::build_graph(edges, false);
}

template <class Fn>
inline bool throws_code(graphpipe::Errc code, Fn&& fn) {
  try {
    fn();
  } catch (const graphpipe::Error& e) {
    return e.code() == code;
  } catch (...) {
    return false;
  }
  return false;
}

}  // namespace testsupport
