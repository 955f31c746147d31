#include "graphpipe/toolset.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include <json.hpp>

namespace graphpipe {

namespace {

using nlohmann::json;

std::string_view answer_type_name(AnswerType t) {
  switch (t) {
    case AnswerType::Boolean: return "Boolean";
    case AnswerType::Count: return "Count";
    case AnswerType::Distance: return "Distance";
  }
  return "?";
}

NodeId require_node_arg(const std::map<std::string, std::string>& args,
                        const std::string& key) {
  auto it = args.find(key);
  if (it == args.end()) {
    fail(Errc::ArgExtraction, "missing tool argument: " + key);
  }
  auto v = parse_number(it->second);
  if (!v || *v < 0 || *v != std::floor(*v)) {
    fail(Errc::ArgExtraction, "bad node id for argument " + key);
  }
  return static_cast<NodeId>(*v);
}

/// Sorted undirected neighbor rows (deduplicated symmetrization).
std::vector<std::vector<std::size_t>> undirected_rows(const GraphStore& store) {
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

const std::vector<ToolDescriptor>& tool_manifest() {
  static const std::vector<ToolDescriptor> manifest = {
      {"edge_existence", {{"u", "node"}, {"v", "node"}}, AnswerType::Boolean},
      {"node_existence", {{"id", "node"}}, AnswerType::Boolean},
      {"edge_count", {}, AnswerType::Count},
      {"node_count", {}, AnswerType::Count},
      {"degree_count", {{"v", "node"}}, AnswerType::Count},
      {"cycle_detection", {}, AnswerType::Boolean},
      {"triangle_count", {}, AnswerType::Count},
      {"path_existence", {{"s", "node"}, {"t", "node"}}, AnswerType::Boolean},
      {"shortest_path", {{"s", "node"}, {"t", "node"}}, AnswerType::Distance},
  };
  return manifest;
}

std::string tool_manifest_json() {
  json out;
  out["tools"] = json::array();
  for (const ToolDescriptor& tool : tool_manifest()) {
    json params = json::array();
    for (const ToolParam& p : tool.params) {
      params.push_back({{"name", p.name}, {"type", p.semantic_type}});
    }
    out["tools"].push_back({{"name", tool.name},
                            {"params", params},
                            {"answer_type", answer_type_name(tool.answer_type)}});
  }
  return out.dump(2);
}

bool edge_existence(const GraphStore& store, NodeId u, NodeId v) {
  return store.canonical().has_edge(u, v);
}

bool node_existence(const GraphStore& store, NodeId id) {
  return store.canonical().has_node(id);
}

std::int64_t edge_count(const GraphStore& store) {
  return static_cast<std::int64_t>(store.canonical().edge_count());
}

std::int64_t node_count(const GraphStore& store) {
  return static_cast<std::int64_t>(store.canonical().node_count());
}

std::int64_t degree_count(const GraphStore& store, NodeId v,
                          DegreeDirection direction) {
  const TopologyView& topo = store.topology();
  std::size_t row = topo.row_of(v);
  if (!store.directed()) return static_cast<std::int64_t>(topo.out[row].size());
  switch (direction) {
    case DegreeDirection::Out:
      return static_cast<std::int64_t>(topo.out[row].size());
    case DegreeDirection::In:
      return static_cast<std::int64_t>(topo.in[row].size());
    case DegreeDirection::Total:
      return static_cast<std::int64_t>(topo.out[row].size() +
                                       topo.in[row].size());
  }
  return 0;
}

StructuralAnswer structural_query(const GraphStore& store, QueryKind kind,
                                  const std::vector<NodeId>& args,
                                  DegreeDirection direction) {
  auto need = [&](std::size_t count) {
    if (args.size() < count) {
      fail(Errc::ArgExtraction, "structural query needs more node arguments");
    }
  };
  StructuralAnswer out;
  switch (kind) {
    case QueryKind::EdgeExistence:
      need(2);
      out.is_boolean = true;
      out.boolean = edge_existence(store, args[0], args[1]);
      break;
    case QueryKind::NodeExistence:
      need(1);
      out.is_boolean = true;
      out.boolean = node_existence(store, args[0]);
      break;
    case QueryKind::EdgeCount:
      out.count = edge_count(store);
      break;
    case QueryKind::NodeCount:
      out.count = node_count(store);
      break;
    case QueryKind::DegreeCount:
      need(1);
      out.count = degree_count(store, args[0], direction);
      break;
  }
  return out;
}

bool cycle_detection(const GraphStore& store) {
  const TopologyView& topo = store.topology();
  std::size_t n = topo.node_ids.size();
  if (store.directed()) {
    // Iterative DFS with colors; a gray->gray edge is a back edge.
    std::vector<int> color(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t start = 0; start < n; ++start) {
      if (color[start] != 0) continue;
      stack.push_back({start, 0});
      color[start] = 1;
      while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < topo.out[node].size()) {
          std::size_t to = topo.row_of(topo.out[node][next].id);
          ++next;
          if (color[to] == 1) return true;
          if (color[to] == 0) {
            color[to] = 1;
            stack.push_back({to, 0});
          }
        } else {
          color[node] = 2;
          stack.pop_back();
        }
      }
    }
    return false;
  }
  // Undirected: any non-tree edge within a component.
  std::vector<std::size_t> parent(n, n);
  std::vector<char> seen(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      std::size_t node = stack.back();
      stack.pop_back();
      for (const auto& nb : topo.out[node]) {
        std::size_t to = topo.row_of(nb.id);
        if (!seen[to]) {
          seen[to] = 1;
          parent[to] = node;
          stack.push_back(to);
        } else if (to != parent[node]) {
          return true;
        }
      }
    }
  }
  return false;
}

std::int64_t triangle_count(const GraphStore& store) {
  auto rows = undirected_rows(store);
  std::size_t n = rows.size();
  std::int64_t triangles = 0;
  // Node iterator: for every node, count adjacent neighbor pairs above it.
  for (std::size_t v = 0; v < n; ++v) {
    const auto& nbs = rows[v];
    for (std::size_t i = 0; i < nbs.size(); ++i) {
      if (nbs[i] <= v) continue;
      for (std::size_t j = i + 1; j < nbs.size(); ++j) {
        if (nbs[j] <= v) continue;
        if (std::binary_search(rows[nbs[i]].begin(), rows[nbs[i]].end(),
                               nbs[j])) {
          ++triangles;
        }
      }
    }
  }
  return triangles;
}

bool path_existence(const GraphStore& store, NodeId s, NodeId t) {
  const TopologyView& topo = store.topology();
  std::size_t from = topo.row_of(s), to = topo.row_of(t);
  std::vector<char> seen(topo.node_ids.size(), 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    std::size_t node = stack.back();
    stack.pop_back();
    if (node == to) return true;
    for (const auto& nb : topo.out[node]) {
      std::size_t next = topo.row_of(nb.id);
      if (!seen[next]) {
        seen[next] = 1;
        stack.push_back(next);
      }
    }
  }
  return false;
}

namespace {

std::vector<double> dijkstra(const TopologyView& topo, std::size_t source,
                             bool reverse) {
  const auto& rows = reverse ? topo.in : topo.out;
  std::size_t n = topo.node_ids.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0;
  queue.push({0, source});
  while (!queue.empty()) {
    auto [d, node] = queue.top();
    queue.pop();
    if (d > dist[node]) continue;
    for (const auto& nb : rows[node]) {
      std::size_t next = topo.row_of(nb.id);
      double cand = d + nb.weight;
      if (cand < dist[next]) {
        dist[next] = cand;
        queue.push({cand, next});
      }
    }
  }
  return dist;
}

}  // namespace

PathResult shortest_path(const GraphStore& store, NodeId s, NodeId t) {
  const TopologyView& topo = store.topology();
  std::size_t from = topo.row_of(s), to = topo.row_of(t);

  std::vector<double> dist_from = dijkstra(topo, from, false);
  if (!std::isfinite(dist_from[to])) return {};

  // Witness reconstruction: distance-to-target lets each step greedily take
  // the smallest next id that still lies on some minimal path.
  std::vector<double> dist_to = dijkstra(topo, to, true);
  const double total = dist_from[to];

  PathResult out;
  out.reachable = true;
  out.distance = total;
  out.path.push_back(s);
  std::size_t node = from;
  const double eps = 1e-9 * std::max(1.0, total);
  while (node != to) {
    std::size_t best = topo.node_ids.size();
    for (const auto& nb : topo.out[node]) {
      std::size_t next = topo.row_of(nb.id);
      if (std::fabs(dist_from[node] + nb.weight + dist_to[next] - total) <=
          eps) {
        if (best == topo.node_ids.size() ||
            topo.node_ids[next] < topo.node_ids[best]) {
          best = next;
        }
      }
    }
    if (best == topo.node_ids.size()) {
      fail(Errc::BadConfig, "shortest-path reconstruction lost the trail");
    }
    node = best;
    out.path.push_back(topo.node_ids[node]);
  }
  return out;
}

std::string normalize_boolean(bool value) { return yes_no(value); }

std::string normalize_count(std::int64_t value) { return std::to_string(value); }

std::string normalize_distance(double value) { return format_number(value); }

std::string execute_tool(const GraphStore& store, const std::string& name,
                         const std::map<std::string, std::string>& args) {
  if (name == "edge_existence") {
    return normalize_boolean(edge_existence(store, require_node_arg(args, "u"),
                                            require_node_arg(args, "v")));
  }
  if (name == "node_existence") {
    return normalize_boolean(node_existence(store, require_node_arg(args, "id")));
  }
  if (name == "edge_count") return normalize_count(edge_count(store));
  if (name == "node_count") return normalize_count(node_count(store));
  if (name == "degree_count") {
    return normalize_count(degree_count(store, require_node_arg(args, "v")));
  }
  if (name == "cycle_detection") {
    return normalize_boolean(cycle_detection(store));
  }
  if (name == "triangle_count") return normalize_count(triangle_count(store));
  if (name == "path_existence") {
    return normalize_boolean(path_existence(store, require_node_arg(args, "s"),
                                            require_node_arg(args, "t")));
  }
  if (name == "shortest_path") {
    PathResult r = shortest_path(store, require_node_arg(args, "s"),
                                 require_node_arg(args, "t"));
    return r.reachable ? normalize_distance(r.distance)
                       : std::string(kNoPathAnswer);
  }
  fail(Errc::ParamSchemaViolation, "unknown tool: " + name);
}

}  // namespace graphpipe
