#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "graphpipe/graph.hpp"
#include "graphpipe/llm.hpp"
#include "graphpipe/prompts.hpp"
#include "graphpipe/representation.hpp"

namespace graphpipe {

struct EdgeChunk {
  std::size_t turn_index = 0;
  std::vector<Edge> edges;
};

/// Order-preserving partition of the input edges: every chunk except
/// possibly the last holds exactly `granularity` edges.
struct ChunkPlan {
  std::size_t granularity = 0;
  std::vector<EdgeChunk> chunks;
};

ChunkPlan plan_chunks(std::span<const Edge> edges, std::size_t granularity);

/// Count-and-grammar check. Transformed edges are never compared against
/// the ground-truth edge identities; only the edge count and the adjacency
/// grammar of the raw reply are inspected.
struct VerifyResult {
  bool passed = false;
  std::size_t expected_count = 0;
  std::size_t parsed_count = 0;
  std::size_t format_violations = 0;
};

VerifyResult verify_chunk(const EdgeChunk& original,
                          std::span<const Edge> parsed,
                          std::string_view raw_reply);

/// Sends the transformation prompt for one rendered chunk and extracts the
/// adjacency items from the reply. No validation happens here.
std::vector<Edge> transform_chunk(const RenderedChunk& rendered,
                                  ChatBackend& llm,
                                  const PromptLibrary& prompts);

std::string transform_prompt(const RenderedChunk& rendered,
                             const PromptLibrary& prompts);

struct IngestOptions {
  std::size_t granularity = 50;
  int max_retries = 3;
  bool directed = false;
  bool fast_path = false;      // skip the LLM when the grammar parses fully
  std::size_t concurrency = 1; // chunk transforms in flight
};

struct ChunkReport {
  std::size_t turn_index = 0;
  VerifyResult result;
  int retries = 0;
  bool accepted = false;
};

struct IngestReport {
  std::vector<ChunkReport> chunks;
  int total_retries = 0;
  std::size_t backend_calls = 0;
  TokenUsage tokens;
  bool fast_path_used = false;
};

struct IngestResult {
  Graph graph;
  IngestReport report;
};

/// Raised when one chunk still fails verification after max_retries; the
/// work done so far stays available on the error.
class ChunkExhaustedError : public Error {
 public:
  ChunkExhaustedError(std::size_t turn_index, IngestReport partial)
      : Error(Errc::ChunkExhausted,
              "chunk " + std::to_string(turn_index) +
                  " failed verification after retries",
              turn_index),
        partial_report(std::move(partial)) {}

  IngestReport partial_report;
};

/// Full sensory pass: deterministic parse of the document, chunk planning,
/// per-chunk LLM transformation with verification and bounded retries, and
/// assembly of the accepted chunks into one graph.
IngestResult ingest(std::string_view document, const Representation& rep,
                    const IngestOptions& options, ChatBackend* llm,
                    const PromptLibrary& prompts);

}  // namespace graphpipe
