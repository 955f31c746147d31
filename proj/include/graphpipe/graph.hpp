#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphpipe/common.hpp"

namespace graphpipe {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  std::optional<double> w;
};

bool operator==(const Edge& a, const Edge& b);

/// Canonical graph: sorted unique node ids, deduplicated edge set, no
/// self-loops, all-or-nothing positive weights. Undirected edges are stored
/// with u <= v. Construct through build_graph; instances are immutable.
class Graph {
 public:
  Graph() = default;

  bool directed() const { return directed_; }
  bool weighted() const { return weighted_; }
  const std::vector<NodeId>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_node(NodeId id) const;
  /// Directed graphs test the arc u->v; undirected test the unordered pair.
  bool has_edge(NodeId u, NodeId v) const;
  std::optional<double> edge_weight(NodeId u, NodeId v) const;

  /// Weight to use in numeric views and solvers: stored weight, or 1.
  double effective_weight(const Edge& e) const {
    return e.w ? *e.w : 1.0;
  }

  friend Graph build_graph(std::span<const Edge> edge_list, bool directed,
                           std::span<const NodeId> isolated_nodes);

 private:
  bool directed_ = false;
  bool weighted_ = false;
  std::vector<NodeId> nodes_;   // sorted ascending
  std::vector<Edge> edges_;     // sorted by (u, v); undirected with u <= v
};

bool operator==(const Graph& a, const Graph& b);

/// Node set = edge endpoints plus explicitly declared isolated nodes.
/// Duplicate edges collapse to the first occurrence; self-loops, negative
/// or zero weights and mixed weighting are rejected.
Graph build_graph(std::span<const Edge> edge_list, bool directed,
                  std::span<const NodeId> isolated_nodes = {});

struct EditDistance {
  std::size_t added = 0;
  std::size_t removed = 0;
  std::size_t total = 0;
};

/// Edge edit distance between graphs over the identical node set: edges to
/// add plus edges to remove to turn g into h. Edge identity is the endpoint
/// pair; weights are not compared.
EditDistance edit_distance(const Graph& g, const Graph& h);

/// Same added/removed counting on the raw edge sets, usable when node sets
/// may drift (diagnostics over faulty transformations).
EditDistance edge_set_difference(const Graph& g, const Graph& h);

struct GecConfig {
  std::int64_t t_max = 4096;  // max tokens per interaction
};

/// Eq.-style efficiency coefficient: structural deviation scaled by total
/// token cost normalized to the per-interaction budget.
double gec(const EditDistance& edit, std::span<const TokenUsage> usages,
           const GecConfig& cfg);

struct BiasParams {
  double p_restart = 0.15;  // restart-to-start probability per step
};

struct SampledGraph {
  Graph graph;                        // node ids relabeled to 0..k-1
  std::vector<NodeId> original_ids;   // original_ids[new_id] = source id
  bool complete = true;               // false when the walk fell short
};

/// Biased random walk over the underlying undirected structure: restarts to
/// the start node with p_restart, otherwise moves to a neighbor with
/// probability proportional to its degree. Stops once target_nodes distinct
/// nodes are visited and returns the induced subgraph, densely relabeled in
/// ascending original-id order. Deterministic for a fixed seed.
SampledGraph sample_subgraph(const Graph& source, std::size_t target_nodes,
                             const BiasParams& bias, std::uint64_t seed);

struct EdgeListFile {
  std::vector<Edge> edges;
  std::vector<NodeId> isolated_nodes;
};

/// One edge per line, whitespace- or comma-separated: `u v [w]`. Lines with
/// a single id declare isolated nodes; `#` starts a comment line.
EdgeListFile read_edge_list(const std::string& path);
EdgeListFile parse_edge_list(std::string_view text);
void write_edge_list(const std::string& path, const Graph& g);
std::string edge_list_text(const Graph& g);

}  // namespace graphpipe
