#pragma once

#include <map>
#include <optional>
#include <string>

#include "graphpipe/catalog.hpp"
#include "graphpipe/llm.hpp"
#include "graphpipe/prompts.hpp"
#include "graphpipe/toolset.hpp"

namespace graphpipe {

/// Routing decision for one question: a manifest tool with arguments, or
/// hand-off to model generation. The backend's reasoning text is kept
/// verbatim for audits.
struct Discrimination {
  bool in_toolset = false;
  std::string tool_name;
  std::map<std::string, std::string> args;
  std::string rationale;
};

enum class SolveErrorKind {
  ToolError,
  DiscriminationError,
  ExecutionError,
  FormatError,
  EdgeError,
};

std::string_view solve_error_name(SolveErrorKind kind);

struct SolveRecord {
  std::string instance_id;
  Discrimination decision;
  std::string answer;
  std::optional<bool> correct;  // set only when ground truth is known
  TokenUsage token_usage;
  std::size_t backend_calls = 0;
  int retries = 0;
  std::optional<SolveErrorKind> error;
  std::string note;
};

/// Keyword routing table used when no chat backend is configured or when a
/// reply cannot be parsed; keeps the whole pipeline runnable without any
/// trained model. Node arguments are read from `node <id>` mentions.
struct FallbackDecision {
  bool in_toolset = false;
  std::string tool_name;                       // in-toolset
  std::optional<CatalogKey> catalog_key;       // out-toolset
  std::map<std::string, std::string> args;
};
std::optional<FallbackDecision> fallback_route(const std::string& question);

/// Parses the Reasoning Agent reply ("Tool: <name>, k=v, ...") against the
/// manifest; replies naming no manifest tool mean out-of-coverage. One
/// reprompt is made when a tool is named but its arguments cannot be
/// recovered. Passing llm = nullptr selects the rule-based fallback.
Discrimination discriminate(const std::string& question, ChatBackend* llm,
                            const PromptLibrary& prompts,
                            int* reprompts = nullptr);

/// Prompts the Model Agent with the catalog and the store's view index and
/// parses "Model: <Key>, k=v, ..."; same fallback and reprompt rules.
ModelPlan generate_plan(const std::string& question, const GraphStore& store,
                        ChatBackend* llm, const PromptLibrary& prompts,
                        int* reprompts = nullptr);

struct SolveOptions {
  PredictiveConfig predictive;
  /// When set, a route disagreeing with this expectation is recorded as a
  /// discrimination error (the answer is still produced).
  std::optional<bool> expect_in_toolset;
};

/// End-to-end: discriminate, then either call the tool or generate and run
/// a model plan. Failures are recorded on the SolveRecord, not thrown.
SolveRecord solve(const std::string& instance_id, const std::string& question,
                  const std::optional<std::string>& ground_truth,
                  const GraphStore& store, ChatBackend* llm,
                  const PromptLibrary& prompts, const SolveOptions& options = {});

}  // namespace graphpipe
