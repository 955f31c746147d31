#pragma once

#include <map>
#include <string>
#include <vector>

#include "graphpipe/buffer.hpp"

namespace graphpipe {

enum class AnswerType { Boolean, Count, Distance };

struct ToolParam {
  std::string name;
  std::string semantic_type;  // "node"
};

struct ToolDescriptor {
  std::string name;
  std::vector<ToolParam> params;
  AnswerType answer_type = AnswerType::Count;
};

/// The nine pre-built tools: five direct-lookup structural queries and four
/// classic traversal/shortest-path algorithms.
const std::vector<ToolDescriptor>& tool_manifest();
std::string tool_manifest_json();

enum class QueryKind {
  EdgeExistence,
  NodeExistence,
  EdgeCount,
  NodeCount,
  DegreeCount
};

enum class DegreeDirection { Total, In, Out };

struct StructuralAnswer {
  bool is_boolean = false;
  bool boolean = false;
  std::int64_t count = 0;
};

/// Direct lookups on the topology view; no traversal. DegreeCount on a
/// directed graph reports in+out unless a direction is passed.
StructuralAnswer structural_query(const GraphStore& store, QueryKind kind,
                                  const std::vector<NodeId>& args,
                                  DegreeDirection direction = DegreeDirection::Total);

bool edge_existence(const GraphStore& store, NodeId u, NodeId v);
bool node_existence(const GraphStore& store, NodeId id);
std::int64_t edge_count(const GraphStore& store);
std::int64_t node_count(const GraphStore& store);
std::int64_t degree_count(const GraphStore& store, NodeId v,
                          DegreeDirection direction = DegreeDirection::Total);

/// True iff any cycle exists: back edge for directed graphs, non-tree edge
/// within a component for undirected ones.
bool cycle_detection(const GraphStore& store);

/// Exact triangle count via node iteration. Directed graphs are counted on
/// their symmetrized structure.
std::int64_t triangle_count(const GraphStore& store);

bool path_existence(const GraphStore& store, NodeId s, NodeId t);

struct PathResult {
  bool reachable = false;
  double distance = 0;
  std::vector<NodeId> path;  // lexicographically smallest among minimal paths
};

/// Dijkstra with unit weights on unweighted graphs. Disconnected pairs are
/// an answer, not an exception.
PathResult shortest_path(const GraphStore& store, NodeId s, NodeId t);

/// Uniform answer serialization: booleans to Yes/No, counts to decimal
/// integers, distances to shortest decimal form.
std::string normalize_boolean(bool value);
std::string normalize_count(std::int64_t value);
std::string normalize_distance(double value);
inline constexpr std::string_view kNoPathAnswer = "No path";

/// Dispatch by manifest tool name with `key=value` arguments; returns the
/// normalized answer string.
std::string execute_tool(const GraphStore& store, const std::string& name,
                         const std::map<std::string, std::string>& args);

}  // namespace graphpipe
