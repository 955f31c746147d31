#include "graphpipe/llm.hpp"

#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace graphpipe {

namespace {

using nlohmann::json;

std::string role_name(ChatMessage::Role r) {
  switch (r) {
    case ChatMessage::Role::System: return "system";
    case ChatMessage::Role::User: return "user";
    case ChatMessage::Role::Assistant: return "assistant";
  }
  return "user";
}

std::string request_text(const ChatRequest& req) {
  std::ostringstream out;
  for (const ChatMessage& m : req.messages) {
    out << role_name(m.role) << ": " << m.content << "\n";
  }
  return out.str();
}

std::int64_t char_tokens(std::size_t chars) {
  return static_cast<std::int64_t>((chars + 3) / 4);
}

}  // namespace

const std::string& ChatRequest::last_user_content() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == ChatMessage::Role::User) return it->content;
  }
  fail(Errc::InvalidRequest, "request has no user message");
}

TokenUsage surrogate_usage(const ChatRequest& req, std::string_view reply) {
  std::size_t in_chars = 0;
  for (const ChatMessage& m : req.messages) in_chars += m.content.size();
  return TokenUsage{char_tokens(in_chars), char_tokens(reply.size())};
}

ChatResponse ChatBackend::chat(const ChatRequest& req) {
  if (req.messages.empty()) {
    fail(Errc::InvalidRequest, "chat request needs at least one message");
  }
  if (req.messages.back().role != ChatMessage::Role::User) {
    fail(Errc::InvalidRequest, "last chat message must have the user role");
  }
  auto start = std::chrono::steady_clock::now();
  ChatResponse res = complete(req);
  res.latency = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return res;
}

std::vector<std::pair<ChatRequest, ChatResponse>> RecordingBackend::transcript()
    const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

std::size_t RecordingBackend::call_count() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_.size();
}

TokenUsage RecordingBackend::token_totals() const {
  std::lock_guard<std::mutex> lock(mutex_);
  TokenUsage total;
  for (const auto& [req, res] : calls_) total += res.usage;
  return total;
}

ChatResponse RecordingBackend::complete(const ChatRequest& req) {
  ChatResponse res = inner_.chat(req);
  std::lock_guard<std::mutex> lock(mutex_);
  calls_.emplace_back(req, res);
  return res;
}

TokenUsage SessionBackend::usage() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return usage_;
}

std::size_t SessionBackend::call_count() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

ChatResponse SessionBackend::complete(const ChatRequest& req) {
  ChatResponse res = inner_.chat(req);
  std::lock_guard<std::mutex> lock(mutex_);
  usage_ += res.usage;
  ++calls_;
  return res;
}

std::vector<ScriptEntry> MockBackend::parse_script_jsonl(
    std::string_view text) {
  std::vector<ScriptEntry> script;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      fail(Errc::SchemaViolation, "bad mock script line", line_no);
    }
    ScriptEntry e;
    if (j.contains("match")) e.match = j["match"].get<std::string>();
    if (j.contains("reply")) e.reply = j["reply"].get<std::string>();
    if (j.contains("in_tokens")) e.in_tokens = j["in_tokens"].get<std::int64_t>();
    if (j.contains("out_tokens"))
      e.out_tokens = j["out_tokens"].get<std::int64_t>();
    if (j.contains("uses")) e.uses = j["uses"].get<int>();
    if (j.value("behavior", "") == "echo") {
      e.echo = true;
      auto kind = rep_kind_from(j.value("rep", "adjacency"));
      if (!kind) fail(Errc::SchemaViolation, "bad rep in script", line_no);
      if (*kind == RepKind::LinguisticDescription) {
        auto pred = predicate_from(j.value("predicate", ""));
        if (!pred) fail(Errc::SchemaViolation, "bad predicate in script", line_no);
        e.echo_rep = Representation::linguistic(*pred);
      } else {
        e.echo_rep = Representation{*kind, {}};
      }
    }
    script.push_back(std::move(e));
  }
  return script;
}

std::unique_ptr<MockBackend> MockBackend::from_jsonl_file(
    const std::string& path) {
  return std::make_unique<MockBackend>(
      parse_script_jsonl(read_text_file(path)));
}

std::size_t MockBackend::calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return calls_;
}

ChatResponse MockBackend::complete(const ChatRequest& req) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string text = request_text(req);
  for (std::size_t i = 0; i < script_.size(); ++i) {
    ScriptEntry& e = script_[i];
    if (e.uses >= 0 && used_[i] >= e.uses) continue;
    if (e.match && text.find(*e.match) == std::string::npos) continue;
    ++used_[i];
    ++calls_;

    std::string reply = e.reply;
    if (e.echo) {
      const std::string& user = req.last_user_content();
      std::size_t open = user.find("<graph>");
      std::size_t close = user.rfind("</graph>");
      if (open == std::string::npos || close == std::string::npos ||
          close <= open) {
        fail(Errc::BackendError, "echo entry found no <graph> section");
      }
      std::string_view chunk(user.data() + open + 7, close - open - 7);
      auto edges = parse_any(chunk, e.echo_rep);
      reply = render(edges, Representation::adjacency()).text;
    }

    ChatResponse res;
    res.content = reply;
    TokenUsage fallback = surrogate_usage(req, reply);
    res.usage.input_tokens = e.in_tokens.value_or(fallback.input_tokens);
    res.usage.output_tokens = e.out_tokens.value_or(fallback.output_tokens);
    return res;
  }
  fail(Errc::ScriptExhausted, "mock script has no entry for this request");
}

ChatResponse CallbackBackend::complete(const ChatRequest& req) {
  ChatResponse res;
  res.content = fn_(req);
  res.usage = surrogate_usage(req, res.content);
  return res;
}

WireBackend::WireBackend(WireConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) {
    fail(Errc::BadConfig, "wire backend requires an endpoint");
  }
}

ChatResponse WireBackend::complete(const ChatRequest& req) {
  json body;
  body["model"] = cfg_.model;
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  body["messages"] = json::array();
  for (const ChatMessage& m : req.messages) {
    body["messages"].push_back(
        {{"role", role_name(m.role)}, {"content", m.content}});
  }
  const std::string payload = body.dump();

  httplib::Client client(cfg_.endpoint);
  client.set_connection_timeout(std::chrono::milliseconds(
      static_cast<int>(cfg_.timeout_seconds * 1000)));
  client.set_read_timeout(std::chrono::milliseconds(
      static_cast<int>(cfg_.timeout_seconds * 1000)));
  httplib::Headers headers;
  if (const char* key = std::getenv(cfg_.credential_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          cfg_.backoff_base_ms * (1 << (attempt - 1))));
    }
    auto res =
        client.Post(cfg_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;  // transient
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;  // transient
    }
    if (res->status != 200) {
      fail(Errc::BackendError,
           "chat endpoint returned status " + std::to_string(res->status));
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) {
      fail(Errc::BackendError, "chat endpoint returned invalid JSON");
    }
    ChatResponse out;
    try {
      out.content =
          reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      fail(Errc::BackendError, "chat endpoint reply missing message content");
    }
    if (reply.contains("usage")) {
      out.usage.input_tokens = reply["usage"].value("prompt_tokens", 0);
      out.usage.output_tokens = reply["usage"].value("completion_tokens", 0);
    } else {
      out.usage = surrogate_usage(req, out.content);
    }
    return out;
  }
  fail(Errc::BackendError, "chat request failed after retries: " + last_error);
}

}  // namespace graphpipe
