#include "graphpipe/benchgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "graphpipe/toolset.hpp"

namespace graphpipe {

namespace {

using nlohmann::json;

constexpr std::size_t kEndpointRetries = 20;
constexpr std::size_t kSampleRetries = 5;
constexpr std::size_t kTrafficSeriesLength = 8;  // observed window
constexpr int kLabelClasses = 3;

struct DomainInfo {
  Domain domain;
  std::string_view name;
  Predicate predicate;
  bool directed;
  std::string_view flavor;
  std::array<std::string_view, 5> scenarios;
};

constexpr std::array<DomainInfo, 4> kDomains = {{
    {Domain::Web,
     "Web",
     Predicate::Linked,
     true,
     "hyperlink",
     {"web crawler efficiency optimization",
      "search engine ranking optimization",
      "web structural integrity diagnosis",
      "topical community discovery",
      "DDoS attack mitigation"}},
    {Domain::Social,
     "Social",
     Predicate::Followed,
     false,
     "social",
     {"information diffusion analysis",
      "community detection and recommendation systems",
      "fraudulent account detection",
      "influence maximization algorithms",
      "social network dynamics analysis"}},
    {Domain::Transportation,
     "Transportation",
     Predicate::Connected,
     false,
     "road",
     {"travel route planning",
      "logistics delivery optimization",
      "urban emergency response planning",
      "public transit network scheduling",
      "shared mobility platforms"}},
    {Domain::Citation,
     "Citation",
     Predicate::Cited,
     true,
     "citation",
     {"scholarly influence tracking",
      "interdisciplinary research identification",
      "seminal paper discovery",
      "literature retrieval ranking optimization",
      "research frontier identification"}},
}};

const DomainInfo& domain_info(Domain d) {
  for (const DomainInfo& info : kDomains) {
    if (info.domain == d) return info;
  }
  fail(Errc::BadConfig, "unknown domain");
}

struct KindInfo {
  TaskKind kind;
  std::string_view name;
  bool in_toolset;
  std::optional<Domain> exclusive;
  bool weighted;
  Metric metric;
  // question core; placeholders {U} {V} {S} {T} {X}
  std::string_view question;
};

constexpr std::array<KindInfo, 21> kKinds = {{
    {TaskKind::EdgeExistence, "EdgeExistence", true, {}, false,
     Metric::Accuracy,
     "Is there an edge between node {U} and node {V}?"},
    {TaskKind::NodeExistence, "NodeExistence", true, {}, false,
     Metric::Accuracy, "Does node {X} exist in this network?"},
    {TaskKind::EdgeCount, "EdgeCount", true, {}, false, Metric::Accuracy,
     "How many edges does the network contain in total?"},
    {TaskKind::NodeCount, "NodeCount", true, {}, false, Metric::Accuracy,
     "How many nodes does the network contain in total?"},
    {TaskKind::DegreeCount, "DegreeCount", true, {}, false, Metric::Accuracy,
     "What is the degree of node {X}?"},
    {TaskKind::CycleDetection, "CycleDetection", true, {}, false,
     Metric::Accuracy, "Does the network contain any cycle?"},
    {TaskKind::TriangleCount, "TriangleCount", true, {}, false,
     Metric::Accuracy, "How many triangles does the network contain?"},
    {TaskKind::PathExistence, "PathExistence", true, {}, false,
     Metric::Accuracy, "Is there a path from node {S} to node {T}?"},
    {TaskKind::ShortestPath, "ShortestPath", true, {}, true, Metric::Accuracy,
     "What is the length of the shortest path from node {S} to node {T}?"},
    {TaskKind::MaxFlow, "MaxFlow", false, Domain::Transportation, true,
     Metric::Accuracy,
     "What is the maximum flow from node {S} to node {T}?"},
    {TaskKind::Diameter, "Diameter", false, Domain::Transportation, true,
     Metric::Accuracy, "What is the diameter of the network?"},
    {TaskKind::MaxCore, "MaxCore", false, Domain::Social, false,
     Metric::Accuracy,
     "What is the largest k such that the network has a non-empty k-core?"},
    {TaskKind::ConnectedComponents, "ConnectedComponents", false,
     Domain::Social, false, Metric::Accuracy,
     "How many connected components does the network have?"},
    {TaskKind::CommonNeighbors, "CommonNeighbors", false, Domain::Web, false,
     Metric::Accuracy,
     "How many common neighbors do node {U} and node {V} have?"},
    {TaskKind::PageRank, "PageRank", false, Domain::Web, false,
     Metric::Accuracy,
     "Which node has the highest PageRank score (damping 0.85)?"},
    {TaskKind::ReferenceMatch, "ReferenceMatch", false, Domain::Citation,
     false, Metric::Accuracy,
     "How many papers are commonly cited by node {U} and node {V}?"},
    {TaskKind::ClusteringCoefficient, "ClusteringCoefficient", false,
     Domain::Citation, false, Metric::Accuracy,
     "What is the local clustering coefficient of node {X}?"},
    {TaskKind::TrafficPrediction, "TrafficPrediction", false,
     Domain::Transportation, false, Metric::MAE,
     "Given the recent traffic readings, predict the next value at node {X}."},
    {TaskKind::LinkPredictionSocial, "LinkPredictionSocial", false,
     Domain::Social, false, Metric::Accuracy,
     "Using link prediction on the existing ties, is a connection between "
     "node {U} and node {V} likely to form?"},
    {TaskKind::LinkPredictionWeb, "LinkPredictionWeb", false, Domain::Web,
     false, Metric::Accuracy,
     "Using link prediction on the existing structure, is a potential "
     "hyperlink between node {U} and node {V} likely?"},
    {TaskKind::NodeClassification, "NodeClassification", false,
     Domain::Citation, false, Metric::Accuracy,
     "Which topic label best classifies node {X}, judging by its neighbors?"},
}};

const KindInfo& kind_info(TaskKind k) {
  for (const KindInfo& info : kKinds) {
    if (info.kind == k) return info;
  }
  fail(Errc::BadConfig, "unknown task kind");
}

std::string fill(std::string text,
                 const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    std::string token = "{" + key + "}";
    std::size_t pos;
    while ((pos = text.find(token)) != std::string::npos) {
      text.replace(pos, token.size(), value);
    }
  }
  return text;
}

bool instance_directed(const GenConfig& cfg, Domain d) {
  auto it = cfg.directed_override.find(d);
  if (it != cfg.directed_override.end()) return it->second;
  return domain_info(d).directed;
}

RepKind draw_rep_kind(const GenConfig& cfg, Rng& rng) {
  double total = 0;
  for (RepKind kind : {RepKind::AdjacencyList, RepKind::SymbolicNotation,
                       RepKind::LinguisticDescription}) {
    auto it = cfg.representation_mix.find(kind);
    if (it != cfg.representation_mix.end()) total += std::max(0.0, it->second);
  }
  if (total <= 0) return RepKind::AdjacencyList;
  double draw = rng.unit() * total;
  for (RepKind kind : {RepKind::AdjacencyList, RepKind::SymbolicNotation,
                       RepKind::LinguisticDescription}) {
    auto it = cfg.representation_mix.find(kind);
    double w = it != cfg.representation_mix.end() ? std::max(0.0, it->second) : 0;
    if (draw < w) return kind;
    draw -= w;
  }
  return RepKind::AdjacencyList;
}

/// Sample with bounded retries until the walk reaches the full target size.
Graph sample_exact(const Graph& source, std::size_t target, std::uint64_t seed) {
  for (std::size_t attempt = 0; attempt < kSampleRetries; ++attempt) {
    SampledGraph s =
        sample_subgraph(source, target, BiasParams{}, mix_seeds({seed, attempt}));
    if (s.complete) return std::move(s.graph);
  }
  fail(Errc::SourceTooSmall, "sampling walk could not reach the target size");
}

/// Disjoint union of `parts` independently sampled connected subgraphs,
/// relabeled onto one dense id range.
Graph sample_parts(const Graph& source, std::size_t total, std::size_t parts,
                   std::uint64_t seed) {
  std::vector<std::size_t> sizes(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++sizes[i];
  std::vector<Edge> edges;
  std::vector<NodeId> nodes;
  NodeId offset = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    Graph part = sample_exact(source, sizes[p], mix_seeds({seed, 77, p}));
    for (const Edge& e : part.edges()) {
      edges.push_back(Edge{e.u + offset, e.v + offset, e.w});
    }
    for (NodeId n : part.nodes()) nodes.push_back(n + offset);
    offset += static_cast<NodeId>(sizes[p]);
  }
  return build_graph(edges, source.directed(), nodes);
}

Graph assign_weights(const Graph& g, Rng& rng) {
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    edges.push_back(
        Edge{e.u, e.v, static_cast<double>(rng.range(1, 10))});
  }
  return build_graph(edges, g.directed(), g.nodes());
}

/// Undirected spanning forest of the sample, keeping direction and weights
/// of the chosen edges; used to make acyclic cycle-detection instances.
Graph spanning_forest(const Graph& g) {
  std::map<NodeId, std::vector<const Edge*>> adj;
  for (const Edge& e : g.edges()) {
    adj[e.u].push_back(&e);
    adj[e.v].push_back(&e);
  }
  std::vector<Edge> kept;
  std::map<NodeId, char> seen;
  for (NodeId root : g.nodes()) {
    if (seen[root]) continue;
    seen[root] = 1;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      NodeId node = stack.back();
      stack.pop_back();
      for (const Edge* e : adj[node]) {
        NodeId other = e->u == node ? e->v : e->u;
        if (seen[other]) continue;
        seen[other] = 1;
        kept.push_back(*e);
        stack.push_back(other);
      }
    }
  }
  return build_graph(kept, g.directed(), g.nodes());
}

NodeId absent_node_id(const Graph& g, Rng& rng) {
  for (;;) {
    NodeId candidate = static_cast<NodeId>(
        g.node_count() + rng.below(g.node_count() + 10));
    if (!g.has_node(candidate)) return candidate;
  }
}

}  // namespace

const std::vector<Domain>& all_domains() {
  static const std::vector<Domain> domains = {
      Domain::Web, Domain::Social, Domain::Transportation, Domain::Citation};
  return domains;
}

const std::vector<TaskKind>& all_task_kinds() {
  static const std::vector<TaskKind> kinds = [] {
    std::vector<TaskKind> out;
    for (const KindInfo& info : kKinds) out.push_back(info.kind);
    return out;
  }();
  return kinds;
}

std::string_view domain_name(Domain d) { return domain_info(d).name; }
std::string_view task_kind_name(TaskKind k) { return kind_info(k).name; }

std::optional<Domain> domain_from(std::string_view name) {
  for (const DomainInfo& info : kDomains) {
    if (info.name == name) return info.domain;
  }
  return std::nullopt;
}

std::optional<TaskKind> task_kind_from(std::string_view name) {
  for (const KindInfo& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

bool kind_valid_for_domain(TaskKind kind, Domain domain) {
  const KindInfo& info = kind_info(kind);
  return !info.exclusive || *info.exclusive == domain;
}

bool kind_in_toolset(TaskKind kind) { return kind_info(kind).in_toolset; }
bool kind_needs_weights(TaskKind kind) { return kind_info(kind).weighted; }
Metric kind_metric(TaskKind kind) { return kind_info(kind).metric; }
Predicate domain_predicate(Domain d) { return domain_info(d).predicate; }
bool domain_directed_default(Domain d) { return domain_info(d).directed; }

Graph make_synthetic_source(Domain domain, std::size_t nodes,
                            std::uint64_t seed, bool directed) {
  if (nodes < 5) fail(Errc::BadConfig, "source needs at least 5 nodes");
  Rng rng(mix_seeds({seed, hash_str(domain_name(domain))}));
  constexpr std::size_t kAttach = 3;

  std::vector<Edge> edges;
  // Endpoint pool repeats nodes once per incident edge, so uniform draws on
  // the pool are degree-proportional.
  std::vector<NodeId> pool;
  for (NodeId v = 0; v < 4; ++v) {
    for (NodeId u = 0; u < v; ++u) {
      edges.push_back(Edge{v, u, std::nullopt});
      pool.push_back(u);
      pool.push_back(v);
    }
  }
  for (NodeId v = 4; v < nodes; ++v) {
    std::vector<NodeId> chosen;
    while (chosen.size() < kAttach) {
      NodeId target = pool[rng.below(pool.size())];
      if (target == v) continue;
      if (std::find(chosen.begin(), chosen.end(), target) != chosen.end())
        continue;
      chosen.push_back(target);
    }
    for (NodeId target : chosen) {
      edges.push_back(Edge{v, target, std::nullopt});  // new -> old
      pool.push_back(v);
      pool.push_back(target);
    }
  }

  if (directed) {
    // A few reversed arcs so directed cycles exist.
    std::size_t extra = std::max<std::size_t>(1, edges.size() / 20);
    std::size_t base_count = edges.size();
    for (std::size_t i = 0; i < extra; ++i) {
      const Edge& e = edges[rng.below(base_count)];
      edges.push_back(Edge{e.v, e.u, std::nullopt});
    }
  }
  return build_graph(edges, directed);
}

std::map<Domain, Graph> default_sources(const GenConfig& cfg) {
  std::size_t largest = 0;
  for (std::size_t s : cfg.scales) largest = std::max(largest, s);
  std::size_t nodes = cfg.source_nodes
                          ? cfg.source_nodes
                          : std::max<std::size_t>(1000, 5 * largest);
  std::map<Domain, Graph> sources;
  for (Domain d : cfg.domains) {
    sources[d] =
        make_synthetic_source(d, nodes, cfg.seed, instance_directed(cfg, d));
  }
  return sources;
}

GraphStore build_instance_store(const TaskInstance& inst) {
  // Traffic series stay in original units; everything else z-scores.
  bool normalize = inst.task_kind != TaskKind::TrafficPrediction;
  return build_views(inst.graph_ref, inst.features, inst.labels, normalize);
}

std::string solve_reference(const TaskInstance& inst,
                            const PredictiveConfig& cfg) {
  GraphStore store = build_instance_store(inst);
  auto node_arg = [&](const std::string& key) {
    auto it = inst.args.find(key);
    if (it == inst.args.end()) {
      fail(Errc::SchemaViolation, "instance missing argument " + key);
    }
    auto v = parse_number(it->second);
    if (!v) fail(Errc::SchemaViolation, "bad node argument " + key);
    return static_cast<NodeId>(*v);
  };

  switch (inst.task_kind) {
    case TaskKind::EdgeExistence:
      return normalize_boolean(
          edge_existence(store, node_arg("u"), node_arg("v")));
    case TaskKind::NodeExistence:
      return normalize_boolean(node_existence(store, node_arg("id")));
    case TaskKind::EdgeCount:
      return normalize_count(edge_count(store));
    case TaskKind::NodeCount:
      return normalize_count(node_count(store));
    case TaskKind::DegreeCount:
      return normalize_count(degree_count(store, node_arg("v")));
    case TaskKind::CycleDetection:
      return normalize_boolean(cycle_detection(store));
    case TaskKind::TriangleCount:
      return normalize_count(triangle_count(store));
    case TaskKind::PathExistence:
      return normalize_boolean(
          path_existence(store, node_arg("s"), node_arg("t")));
    case TaskKind::ShortestPath: {
      PathResult r = shortest_path(store, node_arg("s"), node_arg("t"));
      return r.reachable ? normalize_distance(r.distance)
                         : std::string(kNoPathAnswer);
    }
    case TaskKind::MaxFlow:
      return format_number(max_flow(store, node_arg("s"), node_arg("t")));
    case TaskKind::Diameter: {
      DiameterResult r = diameter(store);
      return r.connected ? format_number(r.value)
                         : std::string(kDisconnectedAnswer);
    }
    case TaskKind::MaxCore:
      return std::to_string(max_core(store));
    case TaskKind::ConnectedComponents:
      return std::to_string(connected_components(store));
    case TaskKind::CommonNeighbors:
      return std::to_string(common_neighbors(
          store, node_arg("u"), node_arg("v"),
          store.directed() ? NeighborDirection::Out
                           : NeighborDirection::Undirected));
    case TaskKind::PageRank:
      return std::to_string(pagerank(store).top_node(store));
    case TaskKind::ReferenceMatch:
      return std::to_string(common_neighbors(store, node_arg("u"),
                                             node_arg("v"),
                                             NeighborDirection::Out));
    case TaskKind::ClusteringCoefficient:
      return format_number(clustering_coefficient(store, node_arg("v")));
    case TaskKind::TrafficPrediction:
      return format_number(predict_traffic(store, node_arg("v"), cfg));
    case TaskKind::LinkPredictionSocial:
    case TaskKind::LinkPredictionWeb:
      return predict_link(store, node_arg("u"), node_arg("v"), cfg);
    case TaskKind::NodeClassification:
      return predict_node_label(store, node_arg("v"));
  }
  fail(Errc::BadConfig, "unknown task kind");
}

namespace {

/// Builds one instance or reports why the draw is infeasible.
std::optional<TaskInstance> make_instance(const GenConfig& cfg,
                                          const Graph& source, Domain domain,
                                          std::size_t scale, TaskKind kind,
                                          std::size_t index,
                                          std::string* skip_reason) {
  const KindInfo& info = kind_info(kind);
  std::uint64_t cell_seed =
      mix_seeds({cfg.seed, hash_str(domain_name(domain)), scale,
                 hash_str(task_kind_name(kind)), index});
  Rng rng(cell_seed);

  // Graph draw. Component/path tasks get a multi-part union for answer
  // diversity; cycle tasks alternate with spanning forests.
  Graph graph;
  if (kind == TaskKind::ConnectedComponents) {
    std::size_t parts = 1 + rng.below(3);
    while (parts > 1 && scale / parts < 5) --parts;
    graph = sample_parts(source, scale, parts, cell_seed);
  } else if (kind == TaskKind::PathExistence) {
    std::size_t parts = 1 + rng.below(2);
    if (scale / 2 < 5) parts = 1;
    graph = sample_parts(source, scale, parts, cell_seed);
  } else {
    graph = sample_exact(source, scale, cell_seed);
    if (kind == TaskKind::CycleDetection && rng.chance(0.5)) {
      graph = spanning_forest(graph);
    }
  }
  if (info.weighted) graph = assign_weights(graph, rng);

  TaskInstance inst;
  inst.domain = domain;
  inst.scale = scale;
  inst.task_kind = kind;
  inst.graph_ref = graph;
  inst.metric = info.metric;

  const std::size_t n = graph.node_count();
  auto random_node = [&] { return graph.nodes()[rng.below(n)]; };
  auto random_pair = [&] {
    NodeId a = random_node(), b = random_node();
    while (b == a) b = random_node();
    return std::pair{a, b};
  };

  std::map<std::string, std::string> text_args;
  switch (kind) {
    case TaskKind::EdgeExistence: {
      NodeId u, v;
      if (rng.chance(0.5) && graph.edge_count() > 0) {
        const Edge& e = graph.edges()[rng.below(graph.edge_count())];
        u = e.u;
        v = e.v;
      } else {
        std::tie(u, v) = random_pair();
      }
      inst.args = {{"u", std::to_string(u)}, {"v", std::to_string(v)}};
      text_args = {{"U", std::to_string(u)}, {"V", std::to_string(v)}};
      break;
    }
    case TaskKind::NodeExistence: {
      NodeId id = rng.chance(0.5) ? random_node() : absent_node_id(graph, rng);
      inst.args = {{"id", std::to_string(id)}};
      text_args = {{"X", std::to_string(id)}};
      break;
    }
    case TaskKind::DegreeCount:
    case TaskKind::ClusteringCoefficient:
    case TaskKind::TrafficPrediction:
    case TaskKind::NodeClassification: {
      NodeId v = random_node();
      inst.args = {{"v", std::to_string(v)}};
      text_args = {{"X", std::to_string(v)}};
      break;
    }
    case TaskKind::PathExistence: {
      auto [s, t] = random_pair();
      inst.args = {{"s", std::to_string(s)}, {"t", std::to_string(t)}};
      text_args = {{"S", std::to_string(s)}, {"T", std::to_string(t)}};
      break;
    }
    case TaskKind::ShortestPath:
    case TaskKind::MaxFlow: {
      GraphStore probe = build_views(graph);
      std::optional<std::pair<NodeId, NodeId>> found;
      for (std::size_t attempt = 0; attempt < kEndpointRetries; ++attempt) {
        auto [s, t] = random_pair();
        if (path_existence(probe, s, t)) {
          found = {s, t};
          break;
        }
      }
      if (!found) {
        *skip_reason = "no reachable endpoint pair";
        return std::nullopt;
      }
      inst.args = {{"s", std::to_string(found->first)},
                   {"t", std::to_string(found->second)}};
      text_args = {{"S", std::to_string(found->first)},
                   {"T", std::to_string(found->second)}};
      break;
    }
    case TaskKind::CommonNeighbors:
    case TaskKind::ReferenceMatch: {
      auto [u, v] = random_pair();
      inst.args = {{"u", std::to_string(u)}, {"v", std::to_string(v)}};
      text_args = {{"U", std::to_string(u)}, {"V", std::to_string(v)}};
      break;
    }
    case TaskKind::LinkPredictionSocial:
    case TaskKind::LinkPredictionWeb: {
      std::optional<std::pair<NodeId, NodeId>> found;
      for (std::size_t attempt = 0; attempt < kEndpointRetries * 3; ++attempt) {
        auto [u, v] = random_pair();
        if (!graph.has_edge(u, v) && !graph.has_edge(v, u)) {
          found = {u, v};
          break;
        }
      }
      if (!found) {
        *skip_reason = "no unconnected node pair";
        return std::nullopt;
      }
      inst.args = {{"u", std::to_string(found->first)},
                   {"v", std::to_string(found->second)}};
      text_args = {{"U", std::to_string(found->first)},
                   {"V", std::to_string(found->second)}};
      break;
    }
    default:
      break;  // no arguments
  }

  if (kind == TaskKind::TrafficPrediction) {
    FeatureTable series;
    std::string truth;
    for (std::size_t row = 0; row < n; ++row) {
      double level = 20.0 + rng.unit() * 80.0;
      std::vector<double> values;
      for (std::size_t t = 0; t < kTrafficSeriesLength + 1; ++t) {
        values.push_back(std::round((level + (rng.unit() - 0.5) * 10.0) * 10) /
                         10);
      }
      if (graph.nodes()[row] == static_cast<NodeId>(
                                    *parse_number(inst.args.at("v")))) {
        truth = format_number(values.back());
      }
      values.pop_back();  // the held-out observation is the ground truth
      series.rows.push_back(std::move(values));
    }
    inst.features = std::move(series);
    inst.ground_truth = truth;
  }
  if (kind == TaskKind::NodeClassification) {
    inst.labels.assign(n, -1);
    for (std::size_t row = 0; row < n; ++row) {
      inst.labels[row] = static_cast<int>(rng.below(kLabelClasses));
    }
    NodeId queried = static_cast<NodeId>(*parse_number(inst.args.at("v")));
    for (std::size_t row = 0; row < n; ++row) {
      if (graph.nodes()[row] == queried) inst.labels[row] = -1;
    }
  }

  // Representation and question text.
  RepKind rep_kind = draw_rep_kind(cfg, rng);
  inst.representation =
      rep_kind == RepKind::LinguisticDescription
          ? Representation::linguistic(domain_predicate(domain))
          : Representation{rep_kind, {}};
  if (graph.edge_count() == 0) {
    *skip_reason = "sample has no edges to render";
    return std::nullopt;
  }
  inst.graph_text = render(graph.edges(), inst.representation).text;

  const DomainInfo& dom = domain_info(domain);
  std::string scenario(dom.scenarios[rng.below(dom.scenarios.size())]);
  std::ostringstream q;
  q << "As part of " << scenario << ", you are examining a " << dom.flavor
    << " network. " << fill(std::string(info.question), text_args);
  inst.question = q.str();

  std::ostringstream id;
  id << dom.name << "-" << scale << "-" << info.name << "-" << index;
  inst.id = id.str();

  if (kind != TaskKind::TrafficPrediction) {
    inst.ground_truth = solve_reference(inst, cfg.predictive);
  }
  return inst;
}

}  // namespace

std::vector<TaskInstance> generate(const std::map<Domain, Graph>& sources,
                                   const GenConfig& cfg,
                                   std::vector<std::string>* skip_log) {
  if (cfg.per_task_count < 1) {
    fail(Errc::BadConfig, "per_task_count must be >= 1");
  }
  if (cfg.domains.empty()) fail(Errc::BadConfig, "no domains requested");
  std::size_t largest = 0;
  for (std::size_t s : cfg.scales) largest = std::max(largest, s);
  for (Domain domain : cfg.domains) {
    auto it = sources.find(domain);
    if (it == sources.end()) {
      fail(Errc::BadConfig,
           "no source graph for domain " + std::string(domain_name(domain)));
    }
    if (it->second.node_count() < largest) {
      fail(Errc::SourceTooSmall,
           "source for " + std::string(domain_name(domain)) +
               " is smaller than the largest requested scale");
    }
  }

  // One cell per (scale, kind): per_task_count instances per kind. Shared
  // kinds rotate through the requested domains; exclusive kinds stay in
  // their domain and drop out when it was not requested.
  struct Cell {
    std::size_t scale;
    TaskKind kind;
    std::optional<Domain> exclusive;
  };
  std::vector<Cell> cells;
  for (std::size_t scale : cfg.scales) {
    for (TaskKind kind : all_task_kinds()) {
      std::optional<Domain> exclusive;
      bool shared = true;
      for (Domain d : all_domains()) {
        if (kind_valid_for_domain(kind, d)) {
          exclusive = d;
        } else {
          shared = false;
        }
      }
      if (shared) {
        exclusive.reset();
      } else {
        bool requested = false;
        for (Domain d : cfg.domains) {
          if (d == *exclusive) requested = true;
        }
        if (!requested) continue;
      }
      cells.push_back({scale, kind, exclusive});
    }
  }

  std::vector<std::vector<TaskInstance>> produced(cells.size());
  std::vector<std::vector<std::string>> skipped(cells.size());
  parallel_for(cells.size(), cfg.concurrency, [&](std::size_t c) {
    const Cell& cell = cells[c];
    for (std::size_t i = 0; i < cfg.per_task_count; ++i) {
      Domain domain = cell.exclusive
                          ? *cell.exclusive
                          : cfg.domains[i % cfg.domains.size()];
      const Graph& source = sources.at(domain);
      std::string reason;
      auto inst =
          make_instance(cfg, source, domain, cell.scale, cell.kind, i, &reason);
      if (inst) {
        produced[c].push_back(std::move(*inst));
      } else {
        std::ostringstream log;
        log << domain_name(domain) << "-" << cell.scale << "-"
            << task_kind_name(cell.kind) << "-" << i << ": " << reason;
        skipped[c].push_back(log.str());
      }
    }
  });

  std::vector<TaskInstance> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (TaskInstance& inst : produced[c]) out.push_back(std::move(inst));
    if (skip_log) {
      skip_log->insert(skip_log->end(), skipped[c].begin(), skipped[c].end());
    }
  }
  return out;
}

namespace {

json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    if (e.w) {
      edges.push_back({e.u, e.v, *e.w});
    } else {
      edges.push_back({e.u, e.v});
    }
  }
  return json{{"directed", g.directed()},
              {"weighted", g.weighted()},
              {"nodes", g.nodes()},
              {"edges", edges}};
}

Graph graph_from_json(const json& j, std::size_t line_no) {
  std::vector<Edge> edges;
  for (const auto& item : j.at("edges")) {
    if (!item.is_array() || item.size() < 2 || item.size() > 3) {
      fail(Errc::SchemaViolation, "bad edge entry", line_no);
    }
    Edge e{item[0].get<NodeId>(), item[1].get<NodeId>(), std::nullopt};
    if (item.size() == 3) e.w = item[2].get<double>();
    edges.push_back(e);
  }
  std::vector<NodeId> nodes = j.at("nodes").get<std::vector<NodeId>>();
  return build_graph(edges, j.at("directed").get<bool>(), nodes);
}

json instance_to_json(const TaskInstance& inst) {
  json j;
  j["id"] = inst.id;
  j["domain"] = std::string(domain_name(inst.domain));
  j["scale"] = inst.scale;
  j["task_kind"] = std::string(task_kind_name(inst.task_kind));
  json rep;
  rep["kind"] = std::string(rep_kind_name(inst.representation.kind));
  if (inst.representation.predicate) {
    rep["predicate"] =
        std::string(predicate_name(*inst.representation.predicate));
  }
  j["representation"] = rep;
  j["question"] = inst.question;
  j["graph_text"] = inst.graph_text;
  j["graph"] = graph_to_json(inst.graph_ref);
  j["args"] = inst.args;
  j["ground_truth"] = inst.ground_truth;
  j["metric"] = inst.metric == Metric::MAE ? "MAE" : "Accuracy";
  if (inst.features) {
    json rows = json::array();
    for (const auto& row : inst.features->rows) rows.push_back(row);
    j["features"] = rows;
  }
  if (!inst.labels.empty()) j["labels"] = inst.labels;
  return j;
}

TaskInstance instance_from_json(const json& j, std::size_t line_no) {
  TaskInstance inst;
  try {
    inst.id = j.at("id").get<std::string>();
    auto domain = domain_from(j.at("domain").get<std::string>());
    auto kind = task_kind_from(j.at("task_kind").get<std::string>());
    if (!domain || !kind) {
      fail(Errc::SchemaViolation, "unknown domain or task kind", line_no);
    }
    inst.domain = *domain;
    inst.task_kind = *kind;
    inst.scale = j.at("scale").get<std::size_t>();
    const json& rep = j.at("representation");
    auto rep_kind = rep_kind_from(rep.at("kind").get<std::string>());
    if (!rep_kind) fail(Errc::SchemaViolation, "unknown representation", line_no);
    if (rep.contains("predicate")) {
      auto pred = predicate_from(rep.at("predicate").get<std::string>());
      if (!pred) fail(Errc::SchemaViolation, "unknown predicate", line_no);
      inst.representation = Representation::linguistic(*pred);
    } else {
      inst.representation = Representation{*rep_kind, {}};
    }
    inst.question = j.at("question").get<std::string>();
    inst.graph_text = j.at("graph_text").get<std::string>();
    inst.graph_ref = graph_from_json(j.at("graph"), line_no);
    if (j.contains("args")) {
      inst.args = j["args"].get<std::map<std::string, std::string>>();
    }
    inst.ground_truth = j.at("ground_truth").get<std::string>();
    inst.metric =
        j.at("metric").get<std::string>() == "MAE" ? Metric::MAE : Metric::Accuracy;
    if (j.contains("features")) {
      FeatureTable table;
      for (const auto& row : j["features"]) {
        table.rows.push_back(row.get<std::vector<double>>());
      }
      inst.features = std::move(table);
    }
    if (j.contains("labels")) {
      inst.labels = j["labels"].get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    fail(Errc::SchemaViolation, e.what(), line_no);
  }
  return inst;
}

}  // namespace

std::string to_jsonl(const std::vector<TaskInstance>& instances) {
  std::ostringstream out;
  for (const TaskInstance& inst : instances) {
    out << instance_to_json(inst).dump() << "\n";
  }
  return out.str();
}

void write_jsonl(const std::vector<TaskInstance>& instances,
                 const std::string& path) {
  write_text_file(path, to_jsonl(instances));
}

std::vector<TaskInstance> parse_jsonl(std::string_view text) {
  std::vector<TaskInstance> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      fail(Errc::SchemaViolation, "invalid JSON object", line_no);
    }
    out.push_back(instance_from_json(j, line_no));
  }
  return out;
}

std::vector<TaskInstance> read_jsonl(const std::string& path) {
  return parse_jsonl(read_text_file(path));
}

GenConfig GenConfig::from_json_text(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    fail(Errc::BadConfig, "generation config is not a JSON object");
  }
  GenConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.per_task_count = j.value("per_task_count", cfg.per_task_count);
  if (j.contains("scales")) {
    cfg.scales = j["scales"].get<std::vector<std::size_t>>();
  }
  if (j.contains("domains")) {
    cfg.domains.clear();
    for (const auto& name : j["domains"]) {
      auto d = domain_from(name.get<std::string>());
      if (!d) fail(Errc::BadConfig, "unknown domain in config");
      cfg.domains.push_back(*d);
    }
  }
  if (j.contains("representation_mix")) {
    cfg.representation_mix.clear();
    for (const auto& [key, value] : j["representation_mix"].items()) {
      auto kind = rep_kind_from(key);
      if (!kind) fail(Errc::BadConfig, "unknown representation in config");
      cfg.representation_mix[*kind] = value.get<double>();
    }
  }
  cfg.source_nodes = j.value("source_nodes", cfg.source_nodes);
  cfg.concurrency = j.value("concurrency", cfg.concurrency);
  if (j.contains("directed_override")) {
    for (const auto& [key, value] : j["directed_override"].items()) {
      auto d = domain_from(key);
      if (!d) fail(Errc::BadConfig, "unknown domain in directed_override");
      cfg.directed_override[*d] = value.get<bool>();
    }
  }
  if (j.contains("link_threshold")) {
    cfg.predictive.link_threshold = j["link_threshold"].get<std::int64_t>();
  }
  if (j.contains("traffic_window")) {
    cfg.predictive.traffic_window = j["traffic_window"].get<std::size_t>();
  }
  return cfg;
}

}  // namespace graphpipe
