#include "graphpipe/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <json.hpp>

namespace graphpipe {

namespace {

using nlohmann::json;

struct KeyName {
  CatalogKey key;
  std::string_view name;
};

constexpr KeyName kKeyNames[] = {
    {CatalogKey::MaxFlow, "MaxFlow"},
    {CatalogKey::Diameter, "Diameter"},
    {CatalogKey::MaxCore, "MaxCore"},
    {CatalogKey::ConnectedComponents, "ConnectedComponents"},
    {CatalogKey::CommonNeighbors, "CommonNeighbors"},
    {CatalogKey::PageRank, "PageRank"},
    {CatalogKey::ReferenceMatch, "ReferenceMatch"},
    {CatalogKey::ClusteringCoefficient, "ClusteringCoefficient"},
    {CatalogKey::LinkPredictionBaseline, "LinkPredictionBaseline"},
    {CatalogKey::NodeClassificationBaseline, "NodeClassificationBaseline"},
    {CatalogKey::TrafficPredictionBaseline, "TrafficPredictionBaseline"},
};

NodeId plan_node(const ModelPlan& plan, const std::string& key) {
  auto it = plan.params.find(key);
  if (it == plan.params.end()) {
    fail(Errc::ParamSchemaViolation,
         "plan for " + std::string(catalog_key_name(plan.key)) +
             " is missing parameter " + key);
  }
  auto v = parse_number(it->second);
  if (!v || *v < 0 || *v != std::floor(*v)) {
    fail(Errc::ParamSchemaViolation, "bad node id for parameter " + key);
  }
  return static_cast<NodeId>(*v);
}

double plan_double(const ModelPlan& plan, const std::string& key,
                   double fallback) {
  auto it = plan.params.find(key);
  if (it == plan.params.end()) return fallback;
  auto v = parse_number(it->second);
  if (!v) fail(Errc::ParamSchemaViolation, "bad number for parameter " + key);
  return *v;
}

std::vector<std::vector<std::size_t>> symmetrized_rows(const GraphStore& store) {
  const TopologyView& topo = store.topology();
  std::size_t n = topo.node_ids.size();
  std::vector<std::vector<std::size_t>> rows(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& nb : topo.out[r]) rows[r].push_back(topo.row_of(nb.id));
    for (const auto& nb : topo.in[r]) rows[r].push_back(topo.row_of(nb.id));
    std::sort(rows[r].begin(), rows[r].end());
    rows[r].erase(std::unique(rows[r].begin(), rows[r].end()), rows[r].end());
  }
  return rows;
}

}  // namespace

std::string_view catalog_key_name(CatalogKey key) {
  for (const KeyName& kn : kKeyNames) {
    if (kn.key == key) return kn.name;
  }
  return "?";
}

std::optional<CatalogKey> catalog_key_from(std::string_view name) {
  for (const KeyName& kn : kKeyNames) {
    if (kn.name == name) return kn.key;
  }
  return std::nullopt;
}

const std::vector<CatalogEntry>& catalog_manifest() {
  static const std::vector<CatalogEntry> manifest = {
      {CatalogKey::MaxFlow, {{"s", "node"}, {"t", "node"}}, FormatId::Topology},
      {CatalogKey::Diameter, {}, FormatId::Matrix},
      {CatalogKey::MaxCore, {}, FormatId::Topology},
      {CatalogKey::ConnectedComponents, {}, FormatId::Topology},
      {CatalogKey::CommonNeighbors,
       {{"u", "node"}, {"v", "node"}},
       FormatId::Topology},
      {CatalogKey::PageRank, {{"damping", "rational"}}, FormatId::EdgeIndex},
      {CatalogKey::ReferenceMatch,
       {{"u", "node"}, {"v", "node"}},
       FormatId::Topology},
      {CatalogKey::ClusteringCoefficient, {{"v", "node"}}, FormatId::Topology},
      {CatalogKey::LinkPredictionBaseline,
       {{"u", "node"}, {"v", "node"}},
       FormatId::Topology},
      {CatalogKey::NodeClassificationBaseline, {{"v", "node"}}, FormatId::Topology},
      {CatalogKey::TrafficPredictionBaseline, {{"v", "node"}}, FormatId::Matrix},
  };
  return manifest;
}

std::string catalog_manifest_json() {
  json out;
  out["models"] = json::array();
  for (const CatalogEntry& entry : catalog_manifest()) {
    json params = json::array();
    for (const ToolParam& p : entry.params) {
      params.push_back({{"name", p.name}, {"type", p.semantic_type}});
    }
    out["models"].push_back(
        {{"key", std::string(catalog_key_name(entry.key))},
         {"params", params},
         {"required_view", std::string(format_id_name(entry.required_view))}});
  }
  return out.dump(2);
}

double max_flow(const GraphStore& store, NodeId s, NodeId t) {
  const TopologyView& topo = store.topology();
  std::size_t source = topo.row_of(s), sink = topo.row_of(t);
  if (source == sink) fail(Errc::ParamSchemaViolation, "max flow needs s != t");
  std::size_t n = topo.node_ids.size();

  // Residual network as an arc list with paired reverse arcs.
  struct Arc {
    std::size_t to;
    double cap;
    std::size_t rev;
  };
  std::vector<std::vector<Arc>> arcs(n);
  auto add_arc = [&](std::size_t a, std::size_t b, double cap_ab,
                     double cap_ba) {
    arcs[a].push_back({b, cap_ab, arcs[b].size()});
    arcs[b].push_back({a, cap_ba, arcs[a].size() - 1});
  };
  for (const Edge& e : store.canonical().edges()) {
    std::size_t a = topo.row_of(e.u), b = topo.row_of(e.v);
    double w = store.canonical().effective_weight(e);
    add_arc(a, b, w, store.directed() ? 0.0 : w);
  }

  double flow = 0;
  for (;;) {
    // BFS for the shortest augmenting path.
    std::vector<std::pair<std::size_t, std::size_t>> prev(
        n, {n, n});  // (node, arc index)
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> queue;
    queue.push(source);
    seen[source] = 1;
    while (!queue.empty() && !seen[sink]) {
      std::size_t node = queue.front();
      queue.pop();
      for (std::size_t i = 0; i < arcs[node].size(); ++i) {
        const Arc& arc = arcs[node][i];
        if (arc.cap <= 0 || seen[arc.to]) continue;
        seen[arc.to] = 1;
        prev[arc.to] = {node, i};
        queue.push(arc.to);
      }
    }
    if (!seen[sink]) break;

    double bottleneck = std::numeric_limits<double>::infinity();
    for (std::size_t node = sink; node != source; node = prev[node].first) {
      bottleneck = std::min(bottleneck,
                            arcs[prev[node].first][prev[node].second].cap);
    }
    for (std::size_t node = sink; node != source; node = prev[node].first) {
      Arc& arc = arcs[prev[node].first][prev[node].second];
      arc.cap -= bottleneck;
      arcs[arc.to][arc.rev].cap += bottleneck;
    }
    flow += bottleneck;
  }
  return flow;
}

DiameterResult diameter(const GraphStore& store) {
  std::size_t n = store.topology().node_ids.size();
  if (n == 0) return {false, 0};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n * n, kInf);
  for (std::size_t i = 0; i < n; ++i) dist[i * n + i] = 0;
  const TopologyView& topo = store.topology();
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& nb : topo.out[r]) {
      std::size_t c = topo.row_of(nb.id);
      dist[r * n + c] = std::min(dist[r * n + c], nb.weight);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double dik = dist[i * n + k];
      if (dik == kInf) continue;
      const double* row_k = &dist[k * n];
      double* row_i = &dist[i * n];
      for (std::size_t j = 0; j < n; ++j) {
        double cand = dik + row_k[j];
        if (cand < row_i[j]) row_i[j] = cand;
      }
    }
  }
  DiameterResult out;
  out.connected = true;
  for (double d : dist) {
    if (d == kInf) return {false, 0};
    out.value = std::max(out.value, d);
  }
  return out;
}

std::int64_t max_core(const GraphStore& store) {
  auto rows = symmetrized_rows(store);
  std::size_t n = rows.size();
  if (n == 0) return 0;

  std::vector<std::size_t> degree(n);
  using Item = std::pair<std::size_t, std::size_t>;  // (degree, node)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = rows[v].size();
    heap.push({degree[v], v});
  }
  // Peel minimum-degree vertices; stale heap entries are skipped lazily.
  std::vector<char> removed(n, 0);
  std::size_t core = 0;
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (removed[v] || d != degree[v]) continue;
    removed[v] = 1;
    core = std::max(core, d);
    for (std::size_t nb : rows[v]) {
      if (!removed[nb] && degree[nb] > 0) {
        --degree[nb];
        heap.push({degree[nb], nb});
      }
    }
  }
  return static_cast<std::int64_t>(core);
}

std::int64_t connected_components(const GraphStore& store) {
  auto rows = symmetrized_rows(store);
  std::size_t n = rows.size();
  std::vector<char> seen(n, 0);
  std::int64_t components = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    std::queue<std::size_t> queue;
    queue.push(start);
    seen[start] = 1;
    while (!queue.empty()) {
      std::size_t node = queue.front();
      queue.pop();
      for (std::size_t nb : rows[node]) {
        if (!seen[nb]) {
          seen[nb] = 1;
          queue.push(nb);
        }
      }
    }
  }
  return components;
}

std::int64_t common_neighbors(const GraphStore& store, NodeId u, NodeId v,
                              NeighborDirection direction) {
  const TopologyView& topo = store.topology();
  std::size_t a = topo.row_of(u), b = topo.row_of(v);
  std::vector<std::size_t> na, nb;
  if (direction == NeighborDirection::Out) {
    for (const auto& x : topo.out[a]) na.push_back(topo.row_of(x.id));
    for (const auto& x : topo.out[b]) nb.push_back(topo.row_of(x.id));
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
  } else {
    auto rows = symmetrized_rows(store);
    na = rows[a];
    nb = rows[b];
  }
  std::vector<std::size_t> shared;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                        std::back_inserter(shared));
  return static_cast<std::int64_t>(shared.size());
}

NodeId PageRankResult::top_node(const GraphStore& store) const {
  const auto& ids = store.topology().node_ids;
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] + 1e-12) best = i;
  }
  return ids[best];
}

PageRankResult pagerank(const GraphStore& store, double damping, double tol,
                        int max_iter) {
  if (!(damping > 0.0 && damping < 1.0)) {
    fail(Errc::ParamSchemaViolation, "damping must lie in (0, 1)");
  }
  const TopologyView& topo = store.topology();
  std::size_t n = topo.node_ids.size();
  PageRankResult out;
  if (n == 0) return out;

  std::vector<double> rank(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  std::vector<std::size_t> out_degree(n);
  for (std::size_t v = 0; v < n; ++v) out_degree[v] = topo.out[v].size();

  for (int iter = 1; iter <= max_iter; ++iter) {
    double dangling = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (out_degree[v] == 0) dangling += rank[v];
    }
    double base = (1.0 - damping) / static_cast<double>(n) +
                  damping * dangling / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    for (std::size_t v = 0; v < n; ++v) {
      if (out_degree[v] == 0) continue;
      double share = damping * rank[v] / static_cast<double>(out_degree[v]);
      for (const auto& nb : topo.out[v]) {
        next[topo.row_of(nb.id)] += share;
      }
    }
    // Keep the probability-vector invariant against floating drift.
    double sum = 0;
    for (double x : next) sum += x;
    for (double& x : next) x /= sum;

    double change = 0;
    for (std::size_t v = 0; v < n; ++v) change += std::fabs(next[v] - rank[v]);
    rank.swap(next);
    out.iterations = iter;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  out.scores = std::move(rank);
  return out;
}

double clustering_coefficient(const GraphStore& store, NodeId v) {
  auto rows = symmetrized_rows(store);
  std::size_t row = store.topology().row_of(v);
  const auto& nbs = rows[row];
  std::size_t degree = nbs.size();
  if (degree < 2) return 0.0;
  std::size_t links = 0;
  for (std::size_t i = 0; i < nbs.size(); ++i) {
    for (std::size_t j = i + 1; j < nbs.size(); ++j) {
      if (std::binary_search(rows[nbs[i]].begin(), rows[nbs[i]].end(),
                             nbs[j])) {
        ++links;
      }
    }
  }
  return 2.0 * static_cast<double>(links) /
         (static_cast<double>(degree) * static_cast<double>(degree - 1));
}

std::string predict_link(const GraphStore& store, NodeId u, NodeId v,
                         const PredictiveConfig& cfg) {
  std::int64_t shared =
      common_neighbors(store, u, v, NeighborDirection::Undirected);
  return yes_no(shared >= cfg.link_threshold);
}

std::string predict_node_label(const GraphStore& store, NodeId v) {
  const auto& labels = store.labels();
  if (labels.empty()) {
    fail(Errc::FeatureRowMismatch, "node classification needs labels");
  }
  auto rows = symmetrized_rows(store);
  std::size_t row = store.topology().row_of(v);

  auto majority = [](const std::map<int, std::int64_t>& votes) {
    int best = 0;
    std::int64_t best_count = -1;
    for (const auto& [label, count] : votes) {
      if (count > best_count) {  // map order makes ties pick the smallest id
        best = label;
        best_count = count;
      }
    }
    return best;
  };

  std::map<int, std::int64_t> votes;
  for (std::size_t nb : rows[row]) {
    if (labels[nb] >= 0) ++votes[labels[nb]];
  }
  if (votes.empty()) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= 0 && i != row) ++votes[labels[i]];
    }
  }
  if (votes.empty()) {
    fail(Errc::FeatureRowMismatch, "no labeled nodes available");
  }
  return std::to_string(majority(votes));
}

double predict_traffic(const GraphStore& store, NodeId v,
                       const PredictiveConfig& cfg) {
  if (!store.features()) {
    fail(Errc::FeatureRowMismatch, "traffic prediction needs a feature table");
  }
  std::size_t row = store.topology().row_of(v);
  const auto& series = store.features()->rows[row];
  if (series.empty()) {
    fail(Errc::FeatureRowMismatch, "empty series for queried node");
  }
  std::size_t k = std::min(cfg.traffic_window, series.size());
  double sum = 0;
  for (std::size_t i = series.size() - k; i < series.size(); ++i) {
    sum += series[i];
  }
  return sum / static_cast<double>(k);
}

std::string execute_plan(const ModelPlan& plan, const GraphStore& store,
                         const PredictiveConfig& cfg) {
  switch (plan.key) {
    case CatalogKey::MaxFlow:
      return format_number(
          max_flow(store, plan_node(plan, "s"), plan_node(plan, "t")));
    case CatalogKey::Diameter: {
      DiameterResult r = diameter(store);
      return r.connected ? format_number(r.value)
                         : std::string(kDisconnectedAnswer);
    }
    case CatalogKey::MaxCore:
      return std::to_string(max_core(store));
    case CatalogKey::ConnectedComponents:
      return std::to_string(connected_components(store));
    case CatalogKey::CommonNeighbors:
      return std::to_string(common_neighbors(
          store, plan_node(plan, "u"), plan_node(plan, "v"),
          store.directed() ? NeighborDirection::Out
                           : NeighborDirection::Undirected));
    case CatalogKey::PageRank: {
      PageRankResult r = pagerank(store, plan_double(plan, "damping", 0.85));
      return std::to_string(r.top_node(store));
    }
    case CatalogKey::ReferenceMatch:
      return std::to_string(common_neighbors(store, plan_node(plan, "u"),
                                             plan_node(plan, "v"),
                                             NeighborDirection::Out));
    case CatalogKey::ClusteringCoefficient:
      return format_number(clustering_coefficient(store, plan_node(plan, "v")));
    case CatalogKey::LinkPredictionBaseline:
      return predict_link(store, plan_node(plan, "u"), plan_node(plan, "v"),
                          cfg);
    case CatalogKey::NodeClassificationBaseline:
      return predict_node_label(store, plan_node(plan, "v"));
    case CatalogKey::TrafficPredictionBaseline:
      return format_number(predict_traffic(store, plan_node(plan, "v"), cfg));
  }
  fail(Errc::UnknownCatalogKey, "unknown catalog key");
}

}  // namespace graphpipe
