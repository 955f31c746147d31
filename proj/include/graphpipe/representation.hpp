#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphpipe/graph.hpp"

namespace graphpipe {

enum class RepKind { AdjacencyList, SymbolicNotation, LinguisticDescription };
enum class Predicate { Linked, Followed, Connected, Cited };

std::string_view rep_kind_name(RepKind k);
std::string_view predicate_name(Predicate p);
std::optional<RepKind> rep_kind_from(std::string_view name);
std::optional<Predicate> predicate_from(std::string_view name);

/// One of the three textual graph formats. Linguistic descriptions carry the
/// domain predicate used in every sentence.
struct Representation {
  RepKind kind = RepKind::AdjacencyList;
  std::optional<Predicate> predicate;

  static Representation adjacency() { return {RepKind::AdjacencyList, {}}; }
  static Representation symbolic() { return {RepKind::SymbolicNotation, {}}; }
  static Representation linguistic(Predicate p) {
    return {RepKind::LinguisticDescription, p};
  }
};

bool operator==(const Representation& a, const Representation& b);

struct RenderedChunk {
  std::string text;
  Representation representation;
  std::size_t edge_count = 0;
  bool weighted = false;
};

/// Deterministic, order-preserving rendering:
///   adjacency list   ->  [u,v],[u,v]        ([u,v,w] when weighted)
///   symbolic         ->  u→v, u→v           (u→v:w when weighted)
///   linguistic       ->  Node u is <Predicate> to node v[ with weight w].
RenderedChunk render(std::span<const Edge> edges, const Representation& rep);

/// Non-throwing scan used by the chunk verifier: extracts every bracket item
/// matching the weighted or unweighted pattern and records the byte offset of
/// every item that opens a bracket but matches neither.
struct ExtractResult {
  std::vector<Edge> edges;
  std::vector<std::size_t> malformed_offsets;
};
ExtractResult scan_adjacency_items(std::string_view text);

/// Extraction of `[u,v]` / `[u,v,w]` items in textual order; surrounding
/// prose without brackets is ignored. Throws MalformedItem (offset of the
/// first bad item) or NoEdgesFound.
std::vector<Edge> parse_adjacency_list(std::string_view text);

/// Deterministic parser for any of the three grammars; inverse of render on
/// well-formed input.
std::vector<Edge> parse_any(std::string_view text, const Representation& rep);
ExtractResult scan_any(std::string_view text, const Representation& rep);

}  // namespace graphpipe
