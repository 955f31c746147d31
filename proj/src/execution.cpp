#include "graphpipe/execution.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace graphpipe {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

/// Ordered `node <id>` mentions.
std::vector<std::string> node_mentions(const std::string& question) {
  std::vector<std::string> out;
  std::string text = lower(question);
  std::size_t pos = 0;
  while ((pos = text.find("node", pos)) != std::string::npos) {
    std::size_t at = pos + 4;
    while (at < text.size() && (text[at] == ' ' || text[at] == '\t')) ++at;
    std::size_t digits = at;
    while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[digits])))
      ++digits;
    if (digits > at) out.push_back(text.substr(at, digits - at));
    pos = digits > at ? digits : pos + 4;
  }
  return out;
}

struct ParsedReply {
  bool found = false;
  std::string name;
  std::map<std::string, std::string> args;
};

std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r\n.");
  return std::string(s.substr(a, b - a + 1));
}

/// Parses `<Marker>: <name>, k=v, k=v` from the first line carrying the
/// marker.
ParsedReply parse_marked_line(const std::string& reply,
                              std::string_view marker) {
  ParsedReply out;
  std::size_t at = reply.find(marker);
  if (at == std::string::npos) return out;
  std::size_t eol = reply.find('\n', at);
  std::string line = reply.substr(
      at + marker.size(), eol == std::string::npos ? std::string::npos
                                                   : eol - at - marker.size());
  out.found = true;
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    parts.push_back(trim(line.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (!parts.empty()) {
    out.name = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
      std::size_t eq = parts[i].find('=');
      if (eq == std::string::npos) continue;
      std::string key = trim(parts[i].substr(0, eq));
      std::string value = trim(parts[i].substr(eq + 1));
      if (!key.empty()) out.args[key] = value;
    }
  }
  return out;
}

const ToolDescriptor* find_tool(const std::string& name) {
  for (const ToolDescriptor& tool : tool_manifest()) {
    if (tool.name == name) return &tool;
  }
  return nullptr;
}

const CatalogEntry* find_catalog_entry(CatalogKey key) {
  for (const CatalogEntry& entry : catalog_manifest()) {
    if (entry.key == key) return &entry;
  }
  return nullptr;
}

bool args_satisfy(const std::vector<ToolParam>& params,
                  const std::map<std::string, std::string>& args) {
  for (const ToolParam& p : params) {
    if (!args.count(p.name)) return false;
  }
  return true;
}

bool declares_out_of_coverage(const std::string& reply) {
  std::string text = lower(reply);
  for (std::string_view phrase :
       {"no available tool", "not in the toolset", "out-of-toolset",
        "outside the toolset", "no single tool", "no tool "}) {
    if (text.find(phrase) != std::string::npos) return true;
  }
  return false;
}

struct Rule {
  std::vector<std::string_view> phrases;  // any-of
  bool in_toolset;
  std::string_view tool;
  CatalogKey key;
  std::vector<std::string_view> param_names;  // filled from node mentions
};

const std::vector<Rule>& fallback_rules() {
  static const std::vector<Rule> rules = {
      {{"shortest"}, true, "shortest_path", {}, {"s", "t"}},
      {{"maximum flow", "max flow"}, false, "", CatalogKey::MaxFlow, {"s", "t"}},
      {{"diameter"}, false, "", CatalogKey::Diameter, {}},
      {{"k-core", "kcore", "max core"}, false, "", CatalogKey::MaxCore, {}},
      {{"connected component", "connected subgraph"},
       false, "", CatalogKey::ConnectedComponents, {}},
      {{"commonly cited", "common reference", "cite in common"},
       false, "", CatalogKey::ReferenceMatch, {"u", "v"}},
      {{"common neighbor", "shared connection", "shared neighbor"},
       false, "", CatalogKey::CommonNeighbors, {"u", "v"}},
      {{"pagerank"}, false, "", CatalogKey::PageRank, {}},
      {{"clustering coefficient"},
       false, "", CatalogKey::ClusteringCoefficient, {"v"}},
      {{"traffic"}, false, "", CatalogKey::TrafficPredictionBaseline, {"v"}},
      {{"classif"}, false, "", CatalogKey::NodeClassificationBaseline, {"v"}},
      {{"latent relationship", "link prediction", "missing connection",
        "potential hyperlink", "form a connection"},
       false, "", CatalogKey::LinkPredictionBaseline, {"u", "v"}},
      {{"triangle"}, true, "triangle_count", {}, {}},
      {{"cycle"}, true, "cycle_detection", {}, {}},
      {{"how many edges", "number of edges", "total edges"},
       true, "edge_count", {}, {}},
      {{"how many nodes", "number of nodes", "total nodes"},
       true, "node_count", {}, {}},
      {{"degree"}, true, "degree_count", {}, {"v"}},
      {{"is there an edge", "an edge between", "direct connection",
        "directly connected", "direct link"},
       true, "edge_existence", {}, {"u", "v"}},
      {{"exist"}, true, "node_existence", {}, {"id"}},
      {{"path", "reach"}, true, "path_existence", {}, {"s", "t"}},
  };
  return rules;
}

}  // namespace

std::string_view solve_error_name(SolveErrorKind kind) {
  switch (kind) {
    case SolveErrorKind::ToolError: return "ToolError";
    case SolveErrorKind::DiscriminationError: return "DiscriminationError";
    case SolveErrorKind::ExecutionError: return "ExecutionError";
    case SolveErrorKind::FormatError: return "FormatError";
    case SolveErrorKind::EdgeError: return "EdgeError";
  }
  return "?";
}

std::optional<FallbackDecision> fallback_route(const std::string& question) {
  std::string text = lower(question);
  for (const Rule& rule : fallback_rules()) {
    bool hit = false;
    for (std::string_view phrase : rule.phrases) {
      if (text.find(phrase) != std::string::npos) {
        hit = true;
        break;
      }
    }
    if (!hit) continue;
    FallbackDecision decision;
    decision.in_toolset = rule.in_toolset;
    decision.tool_name = rule.tool;
    if (!rule.in_toolset) decision.catalog_key = rule.key;
    auto mentions = node_mentions(question);
    for (std::size_t i = 0; i < rule.param_names.size(); ++i) {
      if (i < mentions.size()) {
        decision.args[std::string(rule.param_names[i])] = mentions[i];
      }
    }
    return decision;
  }
  return std::nullopt;
}

Discrimination discriminate(const std::string& question, ChatBackend* llm,
                            const PromptLibrary& prompts, int* reprompts) {
  Discrimination out;
  if (llm == nullptr) {
    auto route = fallback_route(question);
    if (route && route->in_toolset) {
      out.in_toolset = true;
      out.tool_name = route->tool_name;
      out.args = route->args;
      out.rationale = "rule-based fallback";
    } else {
      out.rationale = route ? "rule-based fallback" : "no fallback rule matched";
    }
    return out;
  }

  std::string prompt = PromptLibrary::substitute(
      prompts.get("reasoning_agent"),
      {{"TOOLS", tool_manifest_json()}, {"QUESTION", question}});
  ChatRequest req = ChatRequest::user(prompt);
  ChatResponse res = llm->chat(req);
  out.rationale = res.content;

  ParsedReply parsed = parse_marked_line(res.content, "Tool:");
  if (!parsed.found) {
    if (declares_out_of_coverage(res.content)) return out;
    // Unparseable reply: fall back to the keyword table.
    auto route = fallback_route(question);
    if (route && route->in_toolset) {
      out.in_toolset = true;
      out.tool_name = route->tool_name;
      out.args = route->args;
    }
    return out;
  }
  if (parsed.name == "none" || parsed.name.empty()) return out;
  const ToolDescriptor* tool = find_tool(parsed.name);
  if (tool == nullptr) return out;  // never surface a non-manifest name

  if (!args_satisfy(tool->params, parsed.args)) {
    if (reprompts) ++(*reprompts);
    std::ostringstream ask;
    ask << "Repeat the call as `Tool: " << tool->name;
    for (const ToolParam& p : tool->params) ask << ", " << p.name << "=<value>";
    ask << "` with concrete values.";
    req.messages.push_back({ChatMessage::Role::Assistant, res.content});
    req.messages.push_back({ChatMessage::Role::User, ask.str()});
    ChatResponse retry = llm->chat(req);
    parsed = parse_marked_line(retry.content, "Tool:");
    if (!parsed.found || find_tool(parsed.name) != tool ||
        !args_satisfy(tool->params, parsed.args)) {
      fail(Errc::ArgExtraction,
           "arguments for tool " + tool->name + " were not recoverable");
    }
  }
  out.in_toolset = true;
  out.tool_name = tool->name;
  out.args = parsed.args;
  return out;
}

ModelPlan generate_plan(const std::string& question, const GraphStore& store,
                        ChatBackend* llm, const PromptLibrary& prompts,
                        int* reprompts) {
  auto plan_for = [&](CatalogKey key,
                      std::map<std::string, std::string> args) {
    const CatalogEntry* entry = find_catalog_entry(key);
    ModelPlan plan;
    plan.key = key;
    plan.params = std::move(args);
    plan.required_view = entry->required_view;
    return plan;
  };

  if (llm == nullptr) {
    auto route = fallback_route(question);
    if (!route || route->in_toolset) {
      fail(Errc::UnknownCatalogKey,
           "no catalog rule matches this question in fallback mode");
    }
    return plan_for(*route->catalog_key, route->args);
  }

  std::ostringstream index_text;
  for (const IndexRecord& rec : store.index()) {
    index_text << format_id_name(rec.format_id) << " dims=[";
    for (std::size_t i = 0; i < rec.dimensionality.size(); ++i) {
      if (i) index_text << ",";
      index_text << rec.dimensionality[i];
    }
    index_text << "] " << rec.schema << "\n";
  }
  std::string prompt = PromptLibrary::substitute(
      prompts.get("model_agent"), {{"MODELS", catalog_manifest_json()},
                                   {"INDEX", index_text.str()},
                                   {"QUESTION", question}});
  ChatRequest req = ChatRequest::user(prompt);
  ChatResponse res = llm->chat(req);

  ParsedReply parsed = parse_marked_line(res.content, "Model:");
  std::optional<CatalogKey> key =
      parsed.found ? catalog_key_from(parsed.name) : std::nullopt;
  if (!key) {
    if (reprompts) ++(*reprompts);
    req.messages.push_back({ChatMessage::Role::Assistant, res.content});
    req.messages.push_back(
        {ChatMessage::Role::User,
         "Reply with `Model: <key>, <param>=<value>, ...` using a key from "
         "the catalog."});
    ChatResponse retry = llm->chat(req);
    parsed = parse_marked_line(retry.content, "Model:");
    key = parsed.found ? catalog_key_from(parsed.name) : std::nullopt;
    if (!key) {
      fail(Errc::UnknownCatalogKey,
           "model agent never named a catalog key (last reply: " +
               (parsed.found ? parsed.name : std::string("<unparsed>")) + ")");
    }
  }
  return plan_for(*key, parsed.args);
}

SolveRecord solve(const std::string& instance_id, const std::string& question,
                  const std::optional<std::string>& ground_truth,
                  const GraphStore& store, ChatBackend* llm,
                  const PromptLibrary& prompts, const SolveOptions& options) {
  SolveRecord rec;
  rec.instance_id = instance_id;

  std::optional<SessionBackend> session;
  ChatBackend* handle = nullptr;
  if (llm != nullptr) {
    session.emplace(*llm);
    handle = &*session;
  }

  auto note_error = [&](SolveErrorKind kind, const std::string& note) {
    if (!rec.error) rec.error = kind;
    if (!rec.note.empty()) rec.note += "; ";
    rec.note += note;
  };

  try {
    rec.decision = discriminate(question, handle, prompts, &rec.retries);
    if (options.expect_in_toolset &&
        rec.decision.in_toolset != *options.expect_in_toolset) {
      note_error(SolveErrorKind::DiscriminationError,
                 rec.decision.in_toolset
                     ? "in-toolset route for an out-toolset task"
                     : "out-toolset route for an in-toolset task");
    }
    if (rec.decision.in_toolset) {
      try {
        rec.answer = execute_tool(store, rec.decision.tool_name,
                                  rec.decision.args);
      } catch (const Error& e) {
        note_error(SolveErrorKind::ToolError, e.what());
      }
    } else {
      try {
        ModelPlan plan =
            generate_plan(question, store, handle, prompts, &rec.retries);
        rec.answer = execute_plan(plan, store, options.predictive);
      } catch (const Error& e) {
        note_error(SolveErrorKind::ExecutionError, e.what());
      }
    }
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::ArgExtraction:
        note_error(SolveErrorKind::ToolError, e.what());
        break;
      case Errc::MalformedItem:
      case Errc::NoEdgesFound:
        note_error(SolveErrorKind::FormatError, e.what());
        break;
      default:
        note_error(SolveErrorKind::ExecutionError, e.what());
    }
  }

  if (session) {
    rec.token_usage = session->usage();
    rec.backend_calls = session->call_count();
  }
  if (ground_truth) {
    rec.correct = !rec.answer.empty() && !rec.error &&
                  answers_equal(rec.answer, *ground_truth);
    if (!rec.error && !rec.answer.empty() && !*rec.correct &&
        rec.decision.in_toolset) {
      // Wrong answer from a clean tool run points at selection or arguments.
      note_error(SolveErrorKind::ToolError, "tool answer mismatched truth");
    }
  }
  return rec;
}

}  // namespace graphpipe
