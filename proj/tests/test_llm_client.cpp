#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "graphpipe/llm.hpp"
#include "test_support.hpp"

using namespace graphpipe;
using nlohmann::json;
using testsupport::throws_code;

TEST_CASE("mock backend pops scripted replies with scripted usage") {
  MockBackend mock({ScriptEntry{{}, "hello", 5, 2, false, {}, 1}});
  ChatResponse res = mock.chat(ChatRequest::user("hi"));
  CHECK(res.content == "hello");
  CHECK(res.usage.input_tokens == 5);
  CHECK(res.usage.output_tokens == 2);
  CHECK(mock.calls() == 1);
  CHECK(throws_code(Errc::ScriptExhausted,
                    [&] { mock.chat(ChatRequest::user("again")); }));
}

TEST_CASE("mock match selects by substring") {
  MockBackend mock({
      ScriptEntry{"beta", "B", {}, {}, false, {}, 1},
      ScriptEntry{"alpha", "A", {}, {}, false, {}, -1},
  });
  CHECK(mock.chat(ChatRequest::user("this is alpha")).content == "A");
  CHECK(mock.chat(ChatRequest::user("this is beta")).content == "B");
  CHECK(mock.chat(ChatRequest::user("alpha again")).content == "A");
  CHECK(throws_code(Errc::ScriptExhausted,
                    [&] { mock.chat(ChatRequest::user("gamma")); }));
}

TEST_CASE("mock surrogate usage is a character count") {
  MockBackend mock({ScriptEntry{{}, "12345678", {}, {}, false, {}, 1}});
  ChatResponse res = mock.chat(ChatRequest::user("abcd"));
  CHECK(res.usage.input_tokens == 1);   // ceil(4 / 4)
  CHECK(res.usage.output_tokens == 2);  // ceil(8 / 4)
}

TEST_CASE("mock echo behavior standardizes the chunk") {
  ScriptEntry echo;
  echo.echo = true;
  echo.echo_rep = Representation::symbolic();
  echo.uses = -1;
  MockBackend mock({echo});
  ChatResponse res = mock.chat(ChatRequest::user(
      "convert this\n<graph>\n0→1, 2→3\n</graph>\n"));
  CHECK(res.content == "[0,1],[2,3]");
}

TEST_CASE("mock script JSONL parsing") {
  auto script = MockBackend::parse_script_jsonl(
      R"({"reply": "hi", "in_tokens": 3, "out_tokens": 1})"
      "\n"
      R"({"match": "flow", "reply": "Tool: none"})"
      "\n"
      R"({"behavior": "echo", "rep": "linguistic", "predicate": "Cited", "uses": -1})"
      "\n");
  REQUIRE(script.size() == 3);
  CHECK(script[0].in_tokens == 3);
  CHECK(script[1].match == "flow");
  CHECK(script[2].echo);
  CHECK(script[2].uses == -1);

  CHECK(throws_code(Errc::SchemaViolation, [] {
    MockBackend::parse_script_jsonl("not json\n");
  }));
}

TEST_CASE("request validation") {
  MockBackend mock({ScriptEntry{{}, "x", {}, {}, false, {}, -1}});
  CHECK(throws_code(Errc::InvalidRequest, [&] {
    ChatRequest req;
    mock.chat(req);
  }));
  CHECK(throws_code(Errc::InvalidRequest, [&] {
    ChatRequest req;
    req.messages.push_back({ChatMessage::Role::Assistant, "hi"});
    mock.chat(req);
  }));
}

TEST_CASE("recording backend keeps the ordered call log") {
  MockBackend mock({
      ScriptEntry{{}, "one", 1, 1, false, {}, 1},
      ScriptEntry{{}, "two", 2, 2, false, {}, 1},
      ScriptEntry{{}, "three", 3, 3, false, {}, 1},
  });
  RecordingBackend recorder(mock);
  CHECK(recorder.transcript().empty());
  recorder.chat(ChatRequest::user("a"));
  recorder.chat(ChatRequest::user("b"));
  recorder.chat(ChatRequest::user("c"));
  auto transcript = recorder.transcript();
  REQUIRE(transcript.size() == 3);
  CHECK(transcript[0].second.content == "one");
  CHECK(transcript[2].second.content == "three");
  TokenUsage totals = recorder.token_totals();
  CHECK(totals.input_tokens == 6);
  CHECK(totals.output_tokens == 6);
}

TEST_CASE("mock and transcript are deterministic across runs") {
  auto run = [] {
    MockBackend mock({
        ScriptEntry{"x", "ex", 1, 1, false, {}, -1},
        ScriptEntry{{}, "other", 2, 2, false, {}, -1},
    });
    RecordingBackend recorder(mock);
    std::vector<std::string> replies;
    for (const char* msg : {"a x", "b", "c x", "d"}) {
      replies.push_back(recorder.chat(ChatRequest::user(msg)).content);
    }
    return replies;
  };
  CHECK(run() == run());
}

TEST_CASE("concurrent calls never lose transcript entries") {
  std::vector<ScriptEntry> script;
  for (int i = 0; i < 100; ++i) {
    script.push_back(ScriptEntry{{}, "r" + std::to_string(i), 7, 3, false, {}, 1});
  }
  MockBackend mock(std::move(script));
  RecordingBackend recorder(mock);
  parallel_for(100, 8, [&](std::size_t i) {
    recorder.chat(ChatRequest::user("call " + std::to_string(i)));
  });
  CHECK(recorder.call_count() == 100);
  TokenUsage totals = recorder.token_totals();
  CHECK(totals.input_tokens == 700);
  CHECK(totals.output_tokens == 300);
}

TEST_CASE("session backend partitions shared usage") {
  std::vector<ScriptEntry> script(10, ScriptEntry{{}, "ok", 10, 5, false, {}, 1});
  MockBackend mock(std::move(script));
  RecordingBackend recorder(mock);
  SessionBackend s1(recorder), s2(recorder);
  for (int i = 0; i < 3; ++i) s1.chat(ChatRequest::user("one"));
  for (int i = 0; i < 7; ++i) s2.chat(ChatRequest::user("two"));
  CHECK(s1.usage().input_tokens == 30);
  CHECK(s2.usage().input_tokens == 70);
  TokenUsage total = recorder.token_totals();
  CHECK(total.input_tokens ==
        s1.usage().input_tokens + s2.usage().input_tokens);
  CHECK(total.output_tokens ==
        s1.usage().output_tokens + s2.usage().output_tokens);
}

namespace {

struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};

  explicit StubServer(std::function<void(const httplib::Request&,
                                         httplib::Response&)> handler) {
    server.Post("/v1/chat/completions",
                [this, handler = std::move(handler)](
                    const httplib::Request& req, httplib::Response& res) {
                  ++hits;
                  handler(req, res);
                });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    thread.join();
  }
};

WireConfig wire_config(int port) {
  WireConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
  cfg.model = "stub-model";
  cfg.max_retries = 2;
  cfg.backoff_base_ms = 1;
  return cfg;
}

}  // namespace

TEST_CASE("wire backend parses an OpenAI-style reply") {
  std::mutex seen_mutex;
  std::string seen_body;
  StubServer stub([&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard<std::mutex> lock(seen_mutex);
      seen_body = req.body;
    }
    json reply;
    reply["choices"] = json::array();
    reply["choices"].push_back(
        {{"message", {{"role", "assistant"}, {"content", "stub says hi"}}}});
    reply["usage"] = {{"prompt_tokens", 11}, {"completion_tokens", 4}};
    res.set_content(reply.dump(), "application/json");
  });
  WireBackend backend(wire_config(stub.port));
  ChatResponse res = backend.chat(ChatRequest::user("ping"));
  CHECK(res.content == "stub says hi");
  CHECK(res.usage.input_tokens == 11);
  CHECK(res.usage.output_tokens == 4);
  CHECK(stub.hits == 1);

  std::lock_guard<std::mutex> lock(seen_mutex);
  json body = json::parse(seen_body);
  CHECK(body["model"] == "stub-model");
  CHECK(body["messages"].size() == 1);
  CHECK(body["temperature"] == 0.7);
}

TEST_CASE("wire backend retries transient statuses") {
  std::atomic<int> counter{0};
  StubServer stub([&](const httplib::Request&, httplib::Response& res) {
    if (counter.fetch_add(1) == 0) {
      res.status = 500;
      res.set_content("try later", "text/plain");
      return;
    }
    json reply;
    reply["choices"] = json::array();
    reply["choices"].push_back(
        {{"message", {{"role", "assistant"}, {"content", "recovered"}}}});
    res.set_content(reply.dump(), "application/json");
  });
  WireBackend backend(wire_config(stub.port));
  CHECK(backend.chat(ChatRequest::user("x")).content == "recovered");
  CHECK(stub.hits == 2);
}

TEST_CASE("wire backend never retries non-transient 4xx") {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  WireBackend backend(wire_config(stub.port));
  CHECK(throws_code(Errc::BackendError,
                    [&] { backend.chat(ChatRequest::user("x")); }));
  CHECK(stub.hits == 1);
}

TEST_CASE("wire backend gives up after the retry cap on 429") {
  StubServer stub([](const httplib::Request&, httplib::Response& res) {
    res.status = 429;
    res.set_content("slow down", "text/plain");
  });
  WireBackend backend(wire_config(stub.port));
  CHECK(throws_code(Errc::BackendError,
                    [&] { backend.chat(ChatRequest::user("x")); }));
  CHECK(stub.hits == 3);  // initial attempt + 2 retries
}
