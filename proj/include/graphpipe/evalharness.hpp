#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphpipe/benchgen.hpp"
#include "graphpipe/execution.hpp"
#include "graphpipe/sensory.hpp"

namespace graphpipe {

struct TaskScore {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) /
                                  static_cast<double>(total);
  }
};

struct SuiteReport {
  std::map<TaskKind, TaskScore> per_task;
  std::optional<double> mae;          // TrafficPrediction instances
  std::size_t mae_count = 0;
  TokenUsage tokens;
  std::map<SolveErrorKind, std::size_t> error_histogram;
  std::vector<SolveRecord> records;   // one per instance, instance order
  std::size_t instances = 0;
  std::size_t correct = 0;

  std::string to_json() const;
  std::string to_table() const;
  std::string records_csv() const;
};

struct SuiteOptions {
  std::size_t concurrency = 1;
  /// "auto": sensory pipeline when a backend is present, fast path
  /// otherwise. "fast" and "sensory" force one side.
  std::string ingest_mode = "auto";
  IngestOptions ingest;
  PredictiveConfig predictive;
};

/// Scores a dataset end to end: ingest each instance's graph text, build
/// the store, solve, and compare answers. Per-instance failures are
/// recorded, never thrown.
SuiteReport run_suite(const std::vector<TaskInstance>& instances,
                      ChatBackend* llm, const PromptLibrary& prompts,
                      const SuiteOptions& options = {});

struct NbackTurnScore {
  std::size_t true_correct = 0;
  std::size_t false_correct = 0;
  std::size_t queries = 0;
};

struct NbackReport {
  std::map<int, NbackTurnScore> per_n;

  double accuracy(int n) const;
  std::string to_json() const;
  std::string to_table() const;
};

struct NbackOptions {
  std::size_t chunk_edges = 50;
  std::size_t queries_per_turn = 10;  // half true edges, half absent pairs
  Representation representation = Representation::adjacency();
  std::uint64_t seed = 0;
};

/// Delayed-recall protocol: edges are shown chunk by chunk across dialogue
/// turns; from turn N on, balanced existence queries probe the chunk shown
/// N turns earlier. A null backend answers every query with "No".
NbackReport nback(const Graph& graph, const std::vector<int>& ns,
                  ChatBackend* llm, const NbackOptions& options = {});

struct GecSweepRow {
  std::size_t granularity = 0;
  double mean_edit = 0;
  double mean_cost = 0;  // token sum / t_max, averaged over graphs
  double mean_gec = 0;
  std::size_t failures = 0;
};

struct GecSweepOptions {
  Representation representation = Representation::adjacency();
  GecConfig gec;
  int max_retries = 3;
};

/// Ingests every graph at each granularity and reports mean edit distance,
/// mean normalized token cost, and their product.
std::vector<GecSweepRow> gec_sweep(const std::vector<Graph>& graphs,
                                   const std::vector<std::size_t>& granularities,
                                   ChatBackend& llm,
                                   const PromptLibrary& prompts,
                                   const GecSweepOptions& options = {});

std::string gec_sweep_table(const std::vector<GecSweepRow>& rows);

}  // namespace graphpipe
