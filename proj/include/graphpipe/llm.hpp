#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "graphpipe/common.hpp"
#include "graphpipe/representation.hpp"

namespace graphpipe {

struct ChatMessage {
  enum class Role { System, User, Assistant };
  Role role = Role::User;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;  // non-empty, last role = user
  double temperature = 0.7;
  int max_tokens = 4096;

  static ChatRequest user(std::string content) {
    return ChatRequest{{{ChatMessage::Role::User, std::move(content)}}, 0.7,
                       4096};
  }
  const std::string& last_user_content() const;
};

struct ChatResponse {
  std::string content;
  TokenUsage usage;
  std::chrono::microseconds latency{0};
};

/// Character-count token surrogate used when a backend reports no usage.
TokenUsage surrogate_usage(const ChatRequest& req, std::string_view reply);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// Validates the request shape, delegates to the backend, and stamps the
  /// call latency.
  ChatResponse chat(const ChatRequest& req);

 protected:
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

/// Wraps any backend and keeps the ordered call log; appends are atomic so
/// concurrent callers never lose a record.
class RecordingBackend : public ChatBackend {
 public:
  explicit RecordingBackend(ChatBackend& inner) : inner_(inner) {}

  std::vector<std::pair<ChatRequest, ChatResponse>> transcript() const;
  std::size_t call_count() const;
  TokenUsage token_totals() const;

 protected:
  ChatResponse complete(const ChatRequest& req) override;

 private:
  ChatBackend& inner_;
  mutable std::mutex mutex_;
  std::vector<std::pair<ChatRequest, ChatResponse>> calls_;
};

/// Per-task view over a shared backend: forwards calls and accumulates the
/// usage of exactly the calls made through it.
class SessionBackend : public ChatBackend {
 public:
  explicit SessionBackend(ChatBackend& inner) : inner_(inner) {}

  TokenUsage usage() const;
  std::size_t call_count() const;

 protected:
  ChatResponse complete(const ChatRequest& req) override;

 private:
  ChatBackend& inner_;
  mutable std::mutex mutex_;
  TokenUsage usage_;
  std::size_t calls_ = 0;
};

/// Deterministic scripted backend. Each call consumes the first entry that
/// still has uses left and whose `match` substring occurs in the request
/// text (entries without `match` always qualify). Entries either carry a
/// literal reply or the echo behavior, which re-renders the chunk found
/// between <graph> markers of the last user message as an adjacency list.
struct ScriptEntry {
  std::optional<std::string> match;
  std::string reply;
  std::optional<std::int64_t> in_tokens;
  std::optional<std::int64_t> out_tokens;
  bool echo = false;
  Representation echo_rep = Representation::adjacency();
  int uses = 1;  // -1 = unlimited
};

class MockBackend : public ChatBackend {
 public:
  MockBackend() = default;
  explicit MockBackend(std::vector<ScriptEntry> script)
      : script_(std::move(script)), used_(script_.size(), 0) {}

  /// One JSON object per line: {match?, reply?, in_tokens?, out_tokens?,
  /// behavior?: "echo", rep?, predicate?, uses?}.
  static std::vector<ScriptEntry> parse_script_jsonl(std::string_view text);
  static std::unique_ptr<MockBackend> from_jsonl_file(const std::string& path);

  std::size_t calls() const;

 protected:
  ChatResponse complete(const ChatRequest& req) override;

 private:
  std::vector<ScriptEntry> script_;
  std::vector<int> used_;
  std::size_t calls_ = 0;
  mutable std::mutex mutex_;
};

/// Test-friendly backend computing replies from the request.
class CallbackBackend : public ChatBackend {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit CallbackBackend(Fn fn) : fn_(std::move(fn)) {}

 protected:
  ChatResponse complete(const ChatRequest& req) override;

 private:
  Fn fn_;
};

/// OpenAI-compatible chat-completions client. Credentials come from the
/// environment variable named in the config, never from the command line.
struct WireConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8089 or https://api.example.com
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string credential_env = "GRAPHPIPE_API_KEY";
  double timeout_seconds = 60.0;
  int max_retries = 3;     // transient transport / 429 / 5xx only
  int backoff_base_ms = 250;
};

class WireBackend : public ChatBackend {
 public:
  explicit WireBackend(WireConfig cfg);

 protected:
  ChatResponse complete(const ChatRequest& req) override;

 private:
  WireConfig cfg_;
};

}  // namespace graphpipe
