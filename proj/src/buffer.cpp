#include "graphpipe/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

namespace graphpipe {

namespace {

using nlohmann::json;

std::string store_metadata(const Graph& g) {
  std::ostringstream out;
  out << "directed=" << (g.directed() ? "true" : "false")
      << ";weighted=" << (g.weighted() ? "true" : "false")
      << ";nodes=" << g.node_count() << ";edges=" << g.edge_count();
  return out.str();
}

std::vector<double> normalize_column(std::vector<double> column) {
  const double n = static_cast<double>(column.size());
  double mean = 0;
  for (double x : column) mean += x;
  mean /= n;
  double var = 0;
  for (double x : column) var += (x - mean) * (x - mean);
  double stddev = std::sqrt(var / n);

  if (stddev > 0) {
    const double lo = mean - 3 * stddev, hi = mean + 3 * stddev;
    for (double& x : column) x = std::clamp(x, lo, hi);
    mean = 0;
    for (double x : column) mean += x;
    mean /= n;
    var = 0;
    for (double x : column) var += (x - mean) * (x - mean);
    stddev = std::sqrt(var / n);
  }
  for (double& x : column) x = stddev > 0 ? (x - mean) / stddev : 0.0;
  return column;
}

}  // namespace

std::string_view format_id_name(FormatId f) {
  switch (f) {
    case FormatId::Topology: return "Topology";
    case FormatId::Matrix: return "Matrix";
    case FormatId::EdgeIndex: return "EdgeIndex";
  }
  return "?";
}

std::optional<FormatId> format_id_from(std::string_view name) {
  if (name == "Topology") return FormatId::Topology;
  if (name == "Matrix") return FormatId::Matrix;
  if (name == "EdgeIndex") return FormatId::EdgeIndex;
  return std::nullopt;
}

std::size_t TopologyView::row_of(NodeId id) const {
  auto row = try_row_of(id);
  if (!row) fail(Errc::UnknownNode, "node " + std::to_string(id) + " not in graph");
  return *row;
}

std::optional<std::size_t> TopologyView::try_row_of(NodeId id) const {
  auto it = std::lower_bound(node_ids.begin(), node_ids.end(), id);
  if (it == node_ids.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - node_ids.begin());
}

double MatrixView::at(std::size_t row, std::size_t col) const {
  if (row >= n || col >= n) fail(Errc::UnknownNode, "matrix index out of range");
  if (dense) return values[row * n + col];
  auto it = std::lower_bound(
      entries.begin(), entries.end(), std::pair{row, col},
      [](const Entry& e, const std::pair<std::size_t, std::size_t>& key) {
        return std::pair{e.row, e.col} < key;
      });
  if (it == entries.end() || it->row != row || it->col != col) return 0.0;
  return it->value;
}

std::size_t MatrixView::nonzero_count() const {
  if (!dense) return entries.size();
  std::size_t count = 0;
  for (double v : values) count += v != 0.0;
  return count;
}

const IndexRecord& GraphStore::index_record(FormatId f) const {
  for (const IndexRecord& rec : index_) {
    if (rec.format_id == f) return rec;
  }
  fail(Errc::UnknownFormat, "view not indexed");
}

Graph assemble(const std::vector<std::vector<Edge>>& chunk_outputs,
               bool directed) {
  std::vector<Edge> all;
  std::size_t total = 0;
  for (const auto& chunk : chunk_outputs) total += chunk.size();
  all.reserve(total);
  for (const auto& chunk : chunk_outputs) {
    all.insert(all.end(), chunk.begin(), chunk.end());
  }
  return build_graph(all, directed);
}

GraphStore build_views(const Graph& g, std::optional<FeatureTable> features,
                       std::vector<int> labels, bool normalize_features) {
  if (features && features->rows.size() != g.node_count()) {
    fail(Errc::FeatureRowMismatch,
         "feature table has " + std::to_string(features->rows.size()) +
             " rows for " + std::to_string(g.node_count()) + " nodes");
  }
  if (!labels.empty() && labels.size() != g.node_count()) {
    fail(Errc::FeatureRowMismatch, "label count does not match node count");
  }

  GraphStore store;
  store.graph_ = g;
  const std::size_t n = g.node_count();

  TopologyView& topo = store.topology_;
  topo.node_ids = g.nodes();
  topo.out.assign(n, {});
  topo.in.assign(n, {});
  for (const Edge& e : g.edges()) {
    std::size_t a = topo.row_of(e.u), b = topo.row_of(e.v);
    double w = g.effective_weight(e);
    topo.out[a].push_back({e.v, w});
    topo.in[b].push_back({e.u, w});
    if (!g.directed()) {
      topo.out[b].push_back({e.u, w});
      topo.in[a].push_back({e.v, w});
    }
  }
  auto sort_rows = [](std::vector<std::vector<TopologyView::Neighbor>>& rows) {
    for (auto& row : rows) {
      std::sort(row.begin(), row.end(),
                [](const TopologyView::Neighbor& a,
                   const TopologyView::Neighbor& b) { return a.id < b.id; });
    }
  };
  sort_rows(topo.out);
  sort_rows(topo.in);

  MatrixView& mat = store.matrix_;
  mat.n = n;
  mat.dense = n <= MatrixView::kDenseLimit;
  if (mat.dense) mat.values.assign(n * n, 0.0);
  EdgeIndexView& ei = store.edge_index_;
  for (std::size_t row = 0; row < n; ++row) {
    for (const auto& nb : topo.out[row]) {
      std::size_t col = topo.row_of(nb.id);
      if (mat.dense) {
        mat.values[row * n + col] = nb.weight;
      } else {
        mat.entries.push_back({row, col, nb.weight});
      }
      ei.sources.push_back(row);
      ei.targets.push_back(col);
      ei.weights.push_back(nb.weight);
    }
  }

  store.features_ = std::move(features);
  if (store.features_ && !store.features_->rows.empty()) {
    std::size_t cols = store.features_->rows.front().size();
    for (const auto& row : store.features_->rows) {
      if (row.size() != cols) {
        fail(Errc::FeatureRowMismatch, "ragged feature rows");
      }
    }
    if (normalize_features) {
      for (std::size_t c = 0; c < cols; ++c) {
        std::vector<double> column(n);
        for (std::size_t r = 0; r < n; ++r) {
          column[r] = store.features_->rows[r][c];
        }
        column = normalize_column(std::move(column));
        for (std::size_t r = 0; r < n; ++r) {
          store.features_->rows[r][c] = column[r];
        }
      }
    }
  }
  store.labels_ = std::move(labels);

  const std::string metadata = store_metadata(g);
  store.index_.push_back(
      {FormatId::Topology,
       {n},
       "adjacency map: node -> sorted (neighbor, weight) list",
       metadata});
  store.index_.push_back(
      {FormatId::Matrix,
       {n, n},
       mat.dense ? "dense row-major weight matrix, 0 = absent"
                 : "sparse (row, col, weight) triplets, sorted",
       metadata});
  store.index_.push_back(
      {FormatId::EdgeIndex,
       {2, ei.sources.size()},
       "parallel source/target position arrays plus weights",
       metadata});
  return store;
}

ViewHandle fetch(const GraphStore& store, FormatId format_id) {
  switch (format_id) {
    case FormatId::Topology:
      store.index_record(format_id);
      return &store.topology();
    case FormatId::Matrix:
      store.index_record(format_id);
      return &store.matrix();
    case FormatId::EdgeIndex:
      store.index_record(format_id);
      return &store.edge_index();
  }
  fail(Errc::UnknownFormat, "unknown view format id");
}

void save_store(const GraphStore& store, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::IoError, "cannot create directory: " + dir);

  write_edge_list(dir + "/graph.edgelist", store.canonical());

  json manifest;
  manifest["directed"] = store.canonical().directed();
  manifest["weighted"] = store.canonical().weighted();
  manifest["views"] = json::array();
  for (const IndexRecord& rec : store.index()) {
    manifest["views"].push_back({{"format", format_id_name(rec.format_id)},
                                 {"dims", rec.dimensionality},
                                 {"schema", rec.schema},
                                 {"metadata", rec.metadata}});
  }
  manifest["has_features"] = store.features().has_value();
  manifest["labels"] = store.labels();
  write_text_file(dir + "/index.json", manifest.dump(2) + "\n");

  if (store.features()) {
    std::ostringstream csv;
    for (const auto& row : store.features()->rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) csv << ",";
        csv << format_number(row[c]);
      }
      csv << "\n";
    }
    write_text_file(dir + "/features.csv", csv.str());
  }
}

GraphStore load_store(const std::string& dir) {
  EdgeListFile file = read_edge_list(dir + "/graph.edgelist");
  json manifest = json::parse(read_text_file(dir + "/index.json"));
  Graph g = build_graph(file.edges, manifest.at("directed").get<bool>(),
                        file.isolated_nodes);

  std::optional<FeatureTable> features;
  if (manifest.value("has_features", false)) {
    FeatureTable table;
    std::istringstream in(read_text_file(dir + "/features.csv"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        std::string cell = line.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto v = parse_number(cell);
        if (!v) fail(Errc::IoError, "bad feature cell: " + cell);
        row.push_back(*v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      table.rows.push_back(std::move(row));
    }
    features = std::move(table);
  }
  std::vector<int> labels;
  if (manifest.contains("labels")) {
    labels = manifest["labels"].get<std::vector<int>>();
  }
  return build_views(g, std::move(features), std::move(labels), false);
}

}  // namespace graphpipe
