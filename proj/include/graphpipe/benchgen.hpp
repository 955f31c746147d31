#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphpipe/buffer.hpp"
#include "graphpipe/catalog.hpp"
#include "graphpipe/graph.hpp"
#include "graphpipe/representation.hpp"

namespace graphpipe {

enum class Domain { Web, Social, Transportation, Citation };

enum class TaskKind {
  // structural querying (in-toolset)
  EdgeExistence,
  NodeExistence,
  EdgeCount,
  NodeCount,
  DegreeCount,
  // algorithmic reasoning (in-toolset)
  CycleDetection,
  TriangleCount,
  PathExistence,
  ShortestPath,
  // algorithmic reasoning (out-toolset, domain-exclusive)
  MaxFlow,
  Diameter,
  MaxCore,
  ConnectedComponents,
  CommonNeighbors,
  PageRank,
  ReferenceMatch,
  ClusteringCoefficient,
  // predictive modeling (out-toolset, domain-exclusive)
  TrafficPrediction,
  LinkPredictionSocial,
  LinkPredictionWeb,
  NodeClassification,
};

enum class Metric { Accuracy, MAE };

const std::vector<Domain>& all_domains();
const std::vector<TaskKind>& all_task_kinds();

std::string_view domain_name(Domain d);
std::string_view task_kind_name(TaskKind k);
std::optional<Domain> domain_from(std::string_view name);
std::optional<TaskKind> task_kind_from(std::string_view name);

bool kind_valid_for_domain(TaskKind kind, Domain domain);
bool kind_in_toolset(TaskKind kind);
bool kind_needs_weights(TaskKind kind);
Metric kind_metric(TaskKind kind);
Predicate domain_predicate(Domain d);
bool domain_directed_default(Domain d);

struct TaskInstance {
  std::string id;
  Domain domain = Domain::Web;
  std::size_t scale = 0;
  TaskKind task_kind = TaskKind::EdgeExistence;
  Representation representation;
  std::string question;
  std::string graph_text;
  Graph graph_ref;
  std::map<std::string, std::string> args;  // solver arguments behind the question
  std::string ground_truth;
  Metric metric = Metric::Accuracy;
  std::optional<FeatureTable> features;  // per-node series (traffic)
  std::vector<int> labels;               // per-node labels, -1 = unknown
};

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t per_task_count = 5;
  std::vector<std::size_t> scales = {40};
  std::vector<Domain> domains = {Domain::Web, Domain::Social,
                                 Domain::Transportation, Domain::Citation};
  std::map<RepKind, double> representation_mix = {
      {RepKind::AdjacencyList, 1.0},
      {RepKind::SymbolicNotation, 1.0},
      {RepKind::LinguisticDescription, 1.0}};
  std::size_t source_nodes = 0;  // 0 = max(1000, 5 * largest scale)
  std::size_t concurrency = 1;
  std::map<Domain, bool> directed_override;
  PredictiveConfig predictive;

  static GenConfig from_json_text(std::string_view text);
};

/// Synthetic stand-in source: preferential-attachment graph with a heavy
/// degree tail. Directed domains orient edges new->old plus a few reversed
/// arcs so directed cycles exist.
Graph make_synthetic_source(Domain domain, std::size_t nodes,
                            std::uint64_t seed, bool directed);

std::map<Domain, Graph> default_sources(const GenConfig& cfg);

/// Builds the store for an instance and runs the matching solver on the
/// recorded arguments. This is the ground-truth path; run_suite must reach
/// the same answers through discrimination instead.
std::string solve_reference(const TaskInstance& inst,
                            const PredictiveConfig& cfg = {});

GraphStore build_instance_store(const TaskInstance& inst);

/// Deterministic template-filled dataset: every (domain, scale, valid kind)
/// cell gets per_task_count instances, seeded per cell so parallel and
/// serial runs emit identical output. Infeasible draws are resampled a
/// bounded number of times and then skipped with a log entry.
std::vector<TaskInstance> generate(const std::map<Domain, Graph>& sources,
                                   const GenConfig& cfg,
                                   std::vector<std::string>* skip_log = nullptr);

void write_jsonl(const std::vector<TaskInstance>& instances,
                 const std::string& path);
std::string to_jsonl(const std::vector<TaskInstance>& instances);
std::vector<TaskInstance> read_jsonl(const std::string& path);
std::vector<TaskInstance> parse_jsonl(std::string_view text);

}  // namespace graphpipe
