#include "graphpipe/graph.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace graphpipe {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

std::uint64_t canonical_key(const Graph& g, NodeId u, NodeId v) {
  if (!g.directed() && u > v) std::swap(u, v);
  return pair_key(u, v);
}

std::unordered_set<std::uint64_t> edge_key_set(const Graph& g) {
  std::unordered_set<std::uint64_t> keys;
  keys.reserve(g.edge_count() * 2);
  for (const Edge& e : g.edges()) keys.insert(pair_key(e.u, e.v));
  return keys;
}

}  // namespace

bool operator==(const Edge& a, const Edge& b) {
  return a.u == b.u && a.v == b.v && a.w == b.w;
}

bool Graph::has_node(NodeId id) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (!directed_ && u > v) std::swap(u, v);
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), std::pair{u, v},
      [](const Edge& e, const std::pair<NodeId, NodeId>& key) {
        return std::pair{e.u, e.v} < key;
      });
  return it != edges_.end() && it->u == u && it->v == v;
}

std::optional<double> Graph::edge_weight(NodeId u, NodeId v) const {
  if (!directed_ && u > v) std::swap(u, v);
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), std::pair{u, v},
      [](const Edge& e, const std::pair<NodeId, NodeId>& key) {
        return std::pair{e.u, e.v} < key;
      });
  if (it == edges_.end() || it->u != u || it->v != v) return std::nullopt;
  return it->w ? it->w : std::optional<double>(1.0);
}

bool operator==(const Graph& a, const Graph& b) {
  return a.directed() == b.directed() && a.weighted() == b.weighted() &&
         a.nodes() == b.nodes() && a.edges() == b.edges();
}

Graph build_graph(std::span<const Edge> edge_list, bool directed,
                  std::span<const NodeId> isolated_nodes) {
  Graph g;
  g.directed_ = directed;

  bool any_weighted = false, any_unweighted = false;
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edge_list.size() * 2);
  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  std::vector<NodeId> nodes;

  for (const Edge& in : edge_list) {
    if (in.u == in.v) {
      fail(Errc::SelfLoop, "self-loop on node " + std::to_string(in.u));
    }
    if (in.w) {
      if (!(*in.w > 0.0)) {
        fail(Errc::NegativeWeight,
             "non-positive weight on edge (" + std::to_string(in.u) + "," +
                 std::to_string(in.v) + ")");
      }
      any_weighted = true;
    } else {
      any_unweighted = true;
    }
    Edge e = in;
    if (!directed && e.u > e.v) std::swap(e.u, e.v);
    if (!seen.insert(pair_key(e.u, e.v)).second) continue;  // first wins
    edges.push_back(e);
    nodes.push_back(e.u);
    nodes.push_back(e.v);
  }
  if (any_weighted && any_unweighted) {
    fail(Errc::MixedWeighting, "edge list mixes weighted and unweighted edges");
  }

  nodes.insert(nodes.end(), isolated_nodes.begin(), isolated_nodes.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair{a.u, a.v} < std::pair{b.u, b.v};
  });

  g.weighted_ = any_weighted;
  g.nodes_ = std::move(nodes);
  g.edges_ = std::move(edges);
  return g;
}

EditDistance edit_distance(const Graph& g, const Graph& h) {
  if (g.nodes() != h.nodes()) {
    fail(Errc::NodeSetMismatch, "edit distance requires identical node sets");
  }
  if (g.directed() != h.directed()) {
    fail(Errc::DirectednessMismatch,
         "edit distance requires matching directedness");
  }
  return edge_set_difference(g, h);
}

EditDistance edge_set_difference(const Graph& g, const Graph& h) {
  auto g_keys = edge_key_set(g);
  auto h_keys = edge_key_set(h);
  EditDistance d;
  for (const Edge& e : h.edges()) {
    if (!g_keys.count(canonical_key(g, e.u, e.v))) ++d.added;
  }
  for (const Edge& e : g.edges()) {
    if (!h_keys.count(canonical_key(h, e.u, e.v))) ++d.removed;
  }
  d.total = d.added + d.removed;
  return d;
}

double gec(const EditDistance& edit, std::span<const TokenUsage> usages,
           const GecConfig& cfg) {
  if (cfg.t_max <= 0) fail(Errc::BadConfig, "t_max must be positive");
  std::int64_t tokens = 0;
  for (const TokenUsage& u : usages) tokens += u.total();
  return static_cast<double>(edit.total) * static_cast<double>(tokens) /
         static_cast<double>(cfg.t_max);
}

SampledGraph sample_subgraph(const Graph& source, std::size_t target_nodes,
                             const BiasParams& bias, std::uint64_t seed) {
  if (target_nodes < 1 || target_nodes > source.node_count()) {
    fail(Errc::BadConfig, "target_nodes out of range");
  }

  // Underlying undirected adjacency, indexed by node position.
  const auto& nodes = source.nodes();
  std::unordered_map<NodeId, std::size_t> pos;
  pos.reserve(nodes.size() * 2);
  for (std::size_t i = 0; i < nodes.size(); ++i) pos[nodes[i]] = i;
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (const Edge& e : source.edges()) {
    std::size_t a = pos[e.u], b = pos[e.v];
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  Rng rng(seed);
  std::size_t start = rng.below(nodes.size());
  std::vector<char> visited(nodes.size(), 0);
  std::vector<std::size_t> order;
  visited[start] = 1;
  order.push_back(start);

  std::size_t cur = start;
  std::size_t step_cap = std::max<std::size_t>(1000, 200 * target_nodes);
  for (std::size_t step = 0; order.size() < target_nodes && step < step_cap;
       ++step) {
    if (adj[cur].empty() || rng.chance(bias.p_restart)) {
      cur = start;
      continue;
    }
    // Degree-proportional neighbor choice keeps the heavy tail of the
    // source degree distribution in the sample.
    std::uint64_t total = 0;
    for (std::size_t nb : adj[cur]) total += adj[nb].size();
    std::uint64_t draw = rng.below(total);
    std::size_t chosen = adj[cur].back();
    for (std::size_t nb : adj[cur]) {
      std::uint64_t d = adj[nb].size();
      if (draw < d) {
        chosen = nb;
        break;
      }
      draw -= d;
    }
    cur = chosen;
    if (!visited[cur]) {
      visited[cur] = 1;
      order.push_back(cur);
    }
  }

  SampledGraph out;
  out.complete = order.size() == target_nodes;

  std::sort(order.begin(), order.end());
  out.original_ids.reserve(order.size());
  std::unordered_map<NodeId, NodeId> relabel;
  relabel.reserve(order.size() * 2);
  for (std::size_t i = 0; i < order.size(); ++i) {
    NodeId original = nodes[order[i]];
    out.original_ids.push_back(original);
    relabel[original] = static_cast<NodeId>(i);
  }

  std::vector<Edge> induced;
  for (const Edge& e : source.edges()) {
    auto iu = relabel.find(e.u);
    auto iv = relabel.find(e.v);
    if (iu == relabel.end() || iv == relabel.end()) continue;
    induced.push_back(Edge{iu->second, iv->second, e.w});
  }
  std::vector<NodeId> all_new(order.size());
  for (std::size_t i = 0; i < all_new.size(); ++i) all_new[i] = static_cast<NodeId>(i);
  out.graph = build_graph(induced, source.directed(), all_new);
  return out;
}

namespace {

std::vector<std::string> split_tokens(std::string_view line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      if (!cur.empty()) {
        tokens.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::optional<NodeId> parse_node_id(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  for (char c : tok) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  errno = 0;
  unsigned long long v = std::strtoull(tok.c_str(), nullptr, 10);
  if (errno != 0 || v > 0xffffffffULL) return std::nullopt;
  return static_cast<NodeId>(v);
}

}  // namespace

EdgeListFile parse_edge_list(std::string_view text) {
  EdgeListFile out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    auto tokens = split_tokens(line);
    if (tokens.size() == 1) {
      auto id = parse_node_id(tokens[0]);
      if (!id) fail(Errc::IoError, "bad node id", line_no);
      out.isolated_nodes.push_back(*id);
      continue;
    }
    if (tokens.size() < 2 || tokens.size() > 3) {
      fail(Errc::IoError, "expected `u v [w]`", line_no);
    }
    auto u = parse_node_id(tokens[0]);
    auto v = parse_node_id(tokens[1]);
    if (!u || !v) fail(Errc::IoError, "bad node id", line_no);
    Edge e{*u, *v, std::nullopt};
    if (tokens.size() == 3) {
      auto w = parse_number(tokens[2]);
      if (!w) fail(Errc::IoError, "bad weight", line_no);
      e.w = *w;
    }
    out.edges.push_back(e);
  }
  return out;
}

EdgeListFile read_edge_list(const std::string& path) {
  return parse_edge_list(read_text_file(path));
}

std::string edge_list_text(const Graph& g) {
  std::ostringstream out;
  out << "# directed=" << (g.directed() ? 1 : 0)
      << " weighted=" << (g.weighted() ? 1 : 0) << " nodes=" << g.node_count()
      << " edges=" << g.edge_count() << "\n";
  std::unordered_set<NodeId> covered;
  for (const Edge& e : g.edges()) {
    covered.insert(e.u);
    covered.insert(e.v);
    out << e.u << " " << e.v;
    if (e.w) out << " " << format_number(*e.w);
    out << "\n";
  }
  for (NodeId n : g.nodes()) {
    if (!covered.count(n)) out << n << "\n";
  }
  return out.str();
}

void write_edge_list(const std::string& path, const Graph& g) {
  write_text_file(path, edge_list_text(g));
}

}  // namespace graphpipe
