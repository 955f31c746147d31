#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphpipe/buffer.hpp"
#include "graphpipe/toolset.hpp"

namespace graphpipe {

enum class CatalogKey {
  MaxFlow,
  Diameter,
  MaxCore,
  ConnectedComponents,
  CommonNeighbors,
  PageRank,
  ReferenceMatch,
  ClusteringCoefficient,
  LinkPredictionBaseline,
  NodeClassificationBaseline,
  TrafficPredictionBaseline,
};

std::string_view catalog_key_name(CatalogKey key);
std::optional<CatalogKey> catalog_key_from(std::string_view name);

struct CatalogEntry {
  CatalogKey key;
  std::vector<ToolParam> params;
  FormatId required_view;
};

const std::vector<CatalogEntry>& catalog_manifest();
std::string catalog_manifest_json();

struct ModelPlan {
  CatalogKey key = CatalogKey::MaxFlow;
  std::map<std::string, std::string> params;
  FormatId required_view = FormatId::Topology;
};

/// Edmonds-Karp maximum flow; capacities are edge weights, 1 when
/// unweighted. Undirected edges act as a pair of opposite arcs.
double max_flow(const GraphStore& store, NodeId s, NodeId t);

struct DiameterResult {
  bool connected = false;
  double value = 0;
};
inline constexpr std::string_view kDisconnectedAnswer = "Disconnected";

/// Longest shortest path via Floyd-Warshall over all pairs.
DiameterResult diameter(const GraphStore& store);

/// Largest k with a non-empty k-core, by iterative peeling.
std::int64_t max_core(const GraphStore& store);

/// Number of connected components of the underlying undirected graph,
/// isolated nodes included.
std::int64_t connected_components(const GraphStore& store);

enum class NeighborDirection { Out, Undirected };

std::int64_t common_neighbors(const GraphStore& store, NodeId u, NodeId v,
                              NeighborDirection direction);

struct PageRankResult {
  std::vector<double> scores;  // by node position
  bool converged = false;
  int iterations = 0;

  /// Highest-scoring node id; exact ties resolve to the smallest id.
  NodeId top_node(const GraphStore& store) const;
};

/// Power iteration with uniform dangling-mass redistribution; stops when
/// the L1 change drops below tol. Scores always sum to 1.
PageRankResult pagerank(const GraphStore& store, double damping = 0.85,
                        double tol = 1e-10, int max_iter = 200);

double clustering_coefficient(const GraphStore& store, NodeId v);

struct PredictiveConfig {
  std::int64_t link_threshold = 1;  // common neighbors needed for "Yes"
  std::size_t traffic_window = 3;   // trailing observations averaged
};

/// Deterministic classical stand-ins for the learned predictors: a
/// common-neighbor link rule, neighbor-majority label vote, and a trailing
/// mean over the per-node series held in the feature table.
std::string predict_link(const GraphStore& store, NodeId u, NodeId v,
                         const PredictiveConfig& cfg = {});
std::string predict_node_label(const GraphStore& store, NodeId v);
double predict_traffic(const GraphStore& store, NodeId v,
                       const PredictiveConfig& cfg = {});

/// Validates the plan against the catalog schema, dispatches, and returns
/// the normalized answer string.
std::string execute_plan(const ModelPlan& plan, const GraphStore& store,
                         const PredictiveConfig& cfg = {});

}  // namespace graphpipe
