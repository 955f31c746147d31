#include "graphpipe/sensory.hpp"

#include <algorithm>

#include "graphpipe/buffer.hpp"

namespace graphpipe {

ChunkPlan plan_chunks(std::span<const Edge> edges, std::size_t granularity) {
  if (granularity < 1) fail(Errc::BadConfig, "granularity must be >= 1");
  ChunkPlan plan;
  plan.granularity = granularity;
  for (std::size_t start = 0; start < edges.size(); start += granularity) {
    EdgeChunk chunk;
    chunk.turn_index = plan.chunks.size();
    std::size_t end = std::min(edges.size(), start + granularity);
    chunk.edges.assign(edges.begin() + start, edges.begin() + end);
    plan.chunks.push_back(std::move(chunk));
  }
  return plan;
}

VerifyResult verify_chunk(const EdgeChunk& original,
                          std::span<const Edge> parsed,
                          std::string_view raw_reply) {
  VerifyResult r;
  r.expected_count = original.edges.size();
  r.parsed_count = parsed.size();
  r.format_violations = scan_adjacency_items(raw_reply).malformed_offsets.size();
  r.passed = r.expected_count == r.parsed_count && r.format_violations == 0;
  return r;
}

std::string transform_prompt(const RenderedChunk& rendered,
                             const PromptLibrary& prompts) {
  std::string_view name;
  switch (rendered.representation.kind) {
    case RepKind::AdjacencyList: name = "sensory_adjacency"; break;
    case RepKind::SymbolicNotation: name = "sensory_symbolic"; break;
    case RepKind::LinguisticDescription: name = "sensory_linguistic"; break;
  }
  return PromptLibrary::substitute(prompts.get(name),
                                   {{"CHUNK", rendered.text}});
}

std::vector<Edge> transform_chunk(const RenderedChunk& rendered,
                                  ChatBackend& llm,
                                  const PromptLibrary& prompts) {
  ChatResponse res =
      llm.chat(ChatRequest::user(transform_prompt(rendered, prompts)));
  return parse_adjacency_list(res.content);
}

IngestResult ingest(std::string_view document, const Representation& rep,
                    const IngestOptions& options, ChatBackend* llm,
                    const PromptLibrary& prompts) {
  if (options.max_retries < 0) fail(Errc::BadConfig, "max_retries must be >= 0");
  std::vector<Edge> edges = parse_any(document, rep);

  IngestResult out;
  if (options.fast_path) {
    out.report.fast_path_used = true;
    out.graph = assemble({{edges}}, options.directed);
    return out;
  }
  if (llm == nullptr) {
    fail(Errc::BadConfig, "ingest needs a chat backend unless fast_path is on");
  }

  ChunkPlan plan = plan_chunks(edges, options.granularity);
  SessionBackend session(*llm);

  std::vector<ChunkReport> reports(plan.chunks.size());
  std::vector<std::vector<Edge>> outputs(plan.chunks.size());

  parallel_for(plan.chunks.size(), options.concurrency, [&](std::size_t i) {
    const EdgeChunk& chunk = plan.chunks[i];
    RenderedChunk rendered = render(chunk.edges, rep);
    std::string prompt = transform_prompt(rendered, prompts);

    ChunkReport report;
    report.turn_index = chunk.turn_index;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      ChatResponse res = session.chat(ChatRequest::user(prompt));
      ExtractResult extracted = scan_adjacency_items(res.content);
      report.result = verify_chunk(chunk, extracted.edges, res.content);
      report.retries = attempt;
      if (report.result.passed) {
        report.accepted = true;
        outputs[i] = std::move(extracted.edges);
        break;
      }
    }
    reports[i] = std::move(report);
  });

  IngestReport report;
  report.chunks = std::move(reports);
  report.backend_calls = session.call_count();
  report.tokens = session.usage();
  std::optional<std::size_t> exhausted;
  for (const ChunkReport& c : report.chunks) {
    report.total_retries += c.retries;
    if (!c.accepted && (!exhausted || c.turn_index < *exhausted)) {
      exhausted = c.turn_index;
    }
  }
  if (exhausted) throw ChunkExhaustedError(*exhausted, std::move(report));

  out.report = std::move(report);
  out.graph = assemble(outputs, options.directed);
  return out;
}

}  // namespace graphpipe
