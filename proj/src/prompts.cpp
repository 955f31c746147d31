#include "graphpipe/prompts.hpp"

#include <filesystem>

#include "graphpipe/common.hpp"

namespace graphpipe {

namespace {

constexpr std::string_view kSensoryAdjacency = R"(You are given a fragment of a larger graph, written as an adjacency list.
Restate it as a standardized adjacency list: every edge exactly once, as
[u,v] items (or [u,v,w] when edges carry weights), separated by commas.
Output the items only, with no other text.
<graph>
{CHUNK}
</graph>)";

constexpr std::string_view kSensorySymbolic = R"(You are given a fragment of a larger graph, written in symbolic notation
such as 0{ARROW}1. Convert it to a standardized adjacency list: every edge
exactly once, as [u,v] items (or [u,v,w] when edges carry weights),
separated by commas. Output the items only, with no other text.
<graph>
{CHUNK}
</graph>)";

constexpr std::string_view kSensoryLinguistic = R"(You are given a fragment of a larger graph, described one edge per sentence.
Convert it to a standardized adjacency list: every edge exactly once, as
[u,v] items (or [u,v,w] when edges carry weights), separated by commas.
Output the items only, with no other text.
<graph>
{CHUNK}
</graph>)";

constexpr std::string_view kReasoningAgent = R"(You decide how to answer a graph question with a fixed toolset.
Available tools (JSON manifest):
{TOOLS}

Question:
{QUESTION}

First think about which tool, if any, answers the question. If one tool from
the manifest suffices, reply with a line of the form
  Tool: <name>, <param>=<value>, ...
using the parameter names from the manifest. If no single tool covers the
question, reply with the line
  Tool: none
and nothing else after it.)";

constexpr std::string_view kModelAgent = R"(You pick a task-specific model for a graph question the common toolset does
not cover. Model catalog (JSON manifest):
{MODELS}

Available data views:
{INDEX}

Question:
{QUESTION}

Reply with a line of the form
  Model: <catalog key>, <param>=<value>, ...
using the parameter names from the catalog entry.)";

}  // namespace

PromptLibrary PromptLibrary::defaults() {
  PromptLibrary lib;
  lib.set("sensory_adjacency", std::string(kSensoryAdjacency));
  lib.set("sensory_symbolic",
          substitute(std::string(kSensorySymbolic), {{"ARROW", "→"}}));
  lib.set("sensory_linguistic", std::string(kSensoryLinguistic));
  lib.set("reasoning_agent", std::string(kReasoningAgent));
  lib.set("model_agent", std::string(kModelAgent));
  return lib;
}

PromptLibrary PromptLibrary::from_directory(const std::string& dir) {
  PromptLibrary lib = defaults();
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    fail(Errc::IoError, "prompt template directory not found: " + dir);
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    lib.set(entry.path().stem().string(), read_text_file(entry.path().string()));
  }
  return lib;
}

const std::string& PromptLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    fail(Errc::BadConfig, "unknown prompt template: " + std::string(name));
  }
  return it->second;
}

void PromptLibrary::set(std::string_view name, std::string text) {
  templates_[std::string(name)] = std::move(text);
}

std::string PromptLibrary::substitute(
    std::string text, const std::map<std::string, std::string>& placeholders) {
  for (const auto& [key, value] : placeholders) {
    std::string token = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
      text.replace(pos, token.size(), value);
      pos += value.size();
    }
  }
  return text;
}

}  // namespace graphpipe
