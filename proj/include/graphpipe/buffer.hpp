#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphpipe/graph.hpp"

namespace graphpipe {

enum class FormatId { Topology, Matrix, EdgeIndex };

std::string_view format_id_name(FormatId f);
std::optional<FormatId> format_id_from(std::string_view name);

struct IndexRecord {
  FormatId format_id = FormatId::Topology;
  std::vector<std::size_t> dimensionality;
  std::string schema;
  std::string metadata;
};

/// Adjacency-map view: rows follow the node order of the canonical graph,
/// neighbors sorted by id. Undirected neighbors appear on both endpoints.
struct TopologyView {
  struct Neighbor {
    NodeId id;
    double weight;
  };
  std::vector<NodeId> node_ids;              // sorted, mirrors Graph::nodes()
  std::vector<std::vector<Neighbor>> out;    // out-neighbors (both dirs if undirected)
  std::vector<std::vector<Neighbor>> in;     // equals `out` when undirected

  std::size_t row_of(NodeId id) const;       // UnknownNode if absent
  std::optional<std::size_t> try_row_of(NodeId id) const;
};

/// Weight matrix, dense below the size threshold and coordinate triplets
/// above it. 0 encodes an absent edge.
struct MatrixView {
  static constexpr std::size_t kDenseLimit = 1024;

  std::size_t n = 0;
  bool dense = false;
  std::vector<double> values;  // dense: n*n row-major
  struct Entry {
    std::size_t row, col;
    double value;
  };
  std::vector<Entry> entries;  // sparse: sorted by (row, col)

  double at(std::size_t row, std::size_t col) const;
  std::size_t nonzero_count() const;
};

/// Parallel (source,target,weight) sequences in row order.
struct EdgeIndexView {
  std::vector<std::size_t> sources;  // node positions, not raw ids
  std::vector<std::size_t> targets;
  std::vector<double> weights;
};

struct FeatureTable {
  std::vector<std::vector<double>> rows;  // one row per node, node order
};

/// The buffer: one canonical graph plus immutable derived views and an
/// index describing each of them. Shareable across threads once built.
class GraphStore {
 public:
  const Graph& canonical() const { return graph_; }
  const TopologyView& topology() const { return topology_; }
  const MatrixView& matrix() const { return matrix_; }
  const EdgeIndexView& edge_index() const { return edge_index_; }
  const std::optional<FeatureTable>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<IndexRecord>& index() const { return index_; }

  const IndexRecord& index_record(FormatId f) const;
  bool directed() const { return graph_.directed(); }

  friend GraphStore build_views(const Graph& g,
                                std::optional<FeatureTable> features,
                                std::vector<int> labels,
                                bool normalize_features);

 private:
  Graph graph_;
  TopologyView topology_;
  MatrixView matrix_;
  EdgeIndexView edge_index_;
  std::optional<FeatureTable> features_;
  std::vector<int> labels_;  // optional per-node labels, -1 = unknown
  std::vector<IndexRecord> index_;
};

/// Union of the chunk outputs, deduplicated, built as one canonical graph.
Graph assemble(const std::vector<std::vector<Edge>>& chunk_outputs,
               bool directed);

/// Derives all three views. Features are clipped at three standard
/// deviations and z-scored per column; row count must match the node count.
GraphStore build_views(const Graph& g,
                       std::optional<FeatureTable> features = std::nullopt,
                       std::vector<int> labels = {},
                       bool normalize_features = true);

/// Constant-time view lookup; the handle aliases the store.
using ViewHandle = std::variant<const TopologyView*, const MatrixView*,
                                const EdgeIndexView*>;
ViewHandle fetch(const GraphStore& store, FormatId format_id);

/// Directory serialization: canonical edge list, optional feature CSV, and
/// a JSON index manifest. Byte-deterministic for equal stores.
void save_store(const GraphStore& store, const std::string& dir);
GraphStore load_store(const std::string& dir);

}  // namespace graphpipe
