#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "graphpipe/evalharness.hpp"
#include "test_support.hpp"

using namespace graphpipe;
using testsupport::throws_code;

namespace {

const PromptLibrary& prompts() {
  static PromptLibrary lib = PromptLibrary::defaults();
  return lib;
}

std::vector<TaskInstance> desk_instances(std::uint64_t seed,
                                         std::size_t per_task) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.per_task_count = per_task;
  cfg.scales = {40};
  cfg.source_nodes = 400;
  return generate(default_sources(cfg), cfg);
}

/// Answers every recall query from the conversation history: finds the
/// chunk presented N turns earlier and checks edge membership there.
class PerfectMemoryBackend : public ChatBackend {
 public:
  explicit PerfectMemoryBackend(Representation rep) : rep_(rep) {}

 protected:
  ChatResponse complete(const ChatRequest& req) override {
    const std::string& last = req.messages.back().content;
    ChatResponse res;
    if (last.rfind("Turn ", 0) == 0) {
      turns_.push_back(parse_turn_edges(last));
      res.content = "OK";
    } else {
      res.content = answer_query(last) ? "Yes" : "No";
    }
    res.usage = surrogate_usage(req, res.content);
    return res;
  }

 private:
  std::vector<std::vector<Edge>> parse_turn_edges_all_;
  std::vector<std::vector<Edge>> turns_;
  Representation rep_;

  std::vector<Edge> parse_turn_edges(const std::string& message) {
    std::size_t newline = message.find('\n');
    REQUIRE(newline != std::string::npos);
    return parse_any(message.substr(newline + 1), rep_);
  }

  bool answer_query(const std::string& query) {
    // "Was the edge (u, v) part of the subset shown N turns ago?"
    auto num_after = [&](const char* marker) -> long {
      std::size_t at = query.find(marker);
      REQUIRE(at != std::string::npos);
      return std::strtol(query.c_str() + at + std::strlen(marker), nullptr, 10);
    };
    long u = num_after("(");
    std::size_t comma = query.find(',', query.find('('));
    long v = std::strtol(query.c_str() + comma + 1, nullptr, 10);
    long n = num_after("shown ");
    std::size_t turn = turns_.size() - 1 - static_cast<std::size_t>(n);
    for (const Edge& e : turns_[turn]) {
      if ((e.u == static_cast<NodeId>(u) && e.v == static_cast<NodeId>(v)) ||
          (e.u == static_cast<NodeId>(v) && e.v == static_cast<NodeId>(u))) {
        return true;
      }
    }
    return false;
  }
};

}  // namespace

TEST_CASE("run_suite with the rule fallback aces deterministic kinds") {
  auto instances = desk_instances(101, 1);
  SuiteReport report = run_suite(instances, nullptr, prompts());
  CHECK(report.instances == instances.size());
  for (const auto& [kind, score] : report.per_task) {
    CAPTURE(task_kind_name(kind));
    CHECK(score.accuracy() == 1.0);
  }
  CHECK(report.per_task.size() == 20);  // MAE kind scores separately
  REQUIRE(report.mae.has_value());
  CHECK(report.tokens.total() == 0);  // no backend, no tokens
}

TEST_CASE("run_suite handles the empty dataset") {
  SuiteReport report = run_suite({}, nullptr, prompts());
  CHECK(report.instances == 0);
  CHECK(report.per_task.empty());
  CHECK_FALSE(report.mae.has_value());
  CHECK(report.records.empty());
}

TEST_CASE("suite accuracy is invariant to order and concurrency") {
  auto instances = desk_instances(103, 1);
  SuiteReport base = run_suite(instances, nullptr, prompts());

  std::vector<TaskInstance> shuffled = instances;
  Rng rng(5);
  rng.shuffle(shuffled);
  SuiteOptions options;
  options.concurrency = 4;
  SuiteReport scrambled = run_suite(shuffled, nullptr, prompts(), options);

  REQUIRE(base.per_task.size() == scrambled.per_task.size());
  for (const auto& [kind, score] : base.per_task) {
    CHECK(scrambled.per_task.at(kind).total == score.total);
    CHECK(scrambled.per_task.at(kind).correct == score.correct);
  }
  CHECK(base.correct == scrambled.correct);
}

TEST_CASE("run_suite records exactly one edge error for a corrupted chunk") {
  auto all = desk_instances(107, 1);
  // Keep a single adjacency-list edge-count instance for a surgical fault.
  std::vector<TaskInstance> picked;
  for (const TaskInstance& inst : all) {
    if (inst.task_kind == TaskKind::EdgeCount &&
        inst.representation.kind == RepKind::AdjacencyList) {
      picked.push_back(inst);
      break;
    }
  }
  if (picked.empty()) {
    for (const TaskInstance& inst : all) {
      if (inst.task_kind == TaskKind::EdgeCount) {
        picked.push_back(inst);
        picked.back().representation = Representation::adjacency();
        picked.back().graph_text =
            render(picked.back().graph_ref.edges(), Representation::adjacency())
                .text;
        break;
      }
    }
  }
  REQUIRE(picked.size() == 1);

  // The mock always drops one edge: every attempt fails verification, the
  // chunk exhausts its retries, and the suite records one edge error.
  std::vector<ScriptEntry> script;
  ScriptEntry bad;
  bad.reply = "[0,1]";
  bad.uses = -1;
  script.push_back(bad);
  MockBackend mock(std::move(script));
  SuiteOptions options;
  options.ingest_mode = "sensory";
  options.ingest.max_retries = 2;
  SuiteReport report = run_suite(picked, &mock, prompts(), options);
  CHECK(report.error_histogram[SolveErrorKind::EdgeError] == 1);
  CHECK(report.per_task[TaskKind::EdgeCount].correct == 0);
}

TEST_CASE("run_suite via sensory echo path matches the fast path") {
  auto all = desk_instances(109, 1);
  std::vector<TaskInstance> subset;
  for (const TaskInstance& inst : all) {
    if (inst.representation.kind == RepKind::SymbolicNotation &&
        kind_in_toolset(inst.task_kind)) {
      subset.push_back(inst);
    }
  }
  REQUIRE(!subset.empty());

  // Echo transform plus scripted tool picks through the same backend.
  std::vector<ScriptEntry> script;
  ScriptEntry echo;
  echo.match = "<graph>";
  echo.echo = true;
  echo.echo_rep = Representation::symbolic();
  echo.uses = -1;
  script.push_back(echo);
  for (const TaskInstance& inst : subset) {
    auto route = fallback_route(inst.question);
    REQUIRE(route.has_value());
    std::string reply = "Tool: " + route->tool_name;
    for (const auto& [k, v] : route->args) reply += ", " + k + "=" + v;
    ScriptEntry pick;
    pick.match = inst.question;
    pick.reply = reply;
    pick.uses = -1;
    script.push_back(pick);
  }
  MockBackend mock(std::move(script));
  SuiteOptions options;
  options.ingest_mode = "sensory";
  SuiteReport report = run_suite(subset, &mock, prompts(), options);
  for (const auto& [kind, score] : report.per_task) {
    CAPTURE(task_kind_name(kind));
    CHECK(score.accuracy() == 1.0);
  }
  CHECK(report.tokens.total() > 0);
}

TEST_CASE("suite report serializations") {
  auto instances = desk_instances(113, 1);
  SuiteReport report = run_suite(instances, nullptr, prompts());
  auto parsed = nlohmann::json::parse(report.to_json());
  CHECK(parsed["instances"] == instances.size());
  CHECK(parsed.contains("per_task"));
  std::string table = report.to_table();
  CHECK(table.find("accuracy") != std::string::npos);
  std::string csv = report.records_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(instances.size()) + 1);
}

TEST_CASE("nback scores a perfect responder at 1.0 and always-no at 0.5") {
  Graph graph = testsupport::ring_graph(100, 200, 55);  // 300 edges
  NbackOptions options;
  options.queries_per_turn = 10;
  options.seed = 9;

  PerfectMemoryBackend perfect(Representation::adjacency());
  NbackReport report = nback(graph, {1, 2, 3}, &perfect, options);
  for (int n : {1, 2, 3}) {
    CAPTURE(n);
    CHECK(report.accuracy(n) == 1.0);
    const NbackTurnScore& score = report.per_n.at(n);
    CHECK(score.queries == (6 - n) * 10);
    CHECK(score.true_correct + score.false_correct == score.queries);
  }

  NbackReport reject = nback(graph, {1, 2, 3}, nullptr, options);
  for (int n : {1, 2, 3}) {
    CHECK(reject.accuracy(n) == 0.5);
    const NbackTurnScore& score = reject.per_n.at(n);
    CHECK(score.true_correct == 0);
    CHECK(score.false_correct == score.queries / 2);
  }
}

TEST_CASE("nback validates its preconditions") {
  Graph small = testsupport::ring_graph(20, 10, 1);  // 30 edges
  CHECK(throws_code(Errc::GraphTooSmall,
                    [&] { nback(small, {1}, nullptr, {}); }));
  Graph graph = testsupport::ring_graph(100, 200, 2);
  NbackOptions odd;
  odd.queries_per_turn = 7;
  CHECK(throws_code(Errc::BadConfig, [&] { nback(graph, {1}, nullptr, odd); }));
  CHECK(throws_code(Errc::BadConfig, [&] { nback(graph, {0}, nullptr, {}); }));
}

TEST_CASE("nback balanced accuracy identity") {
  Graph graph = testsupport::ring_graph(100, 200, 77);
  NbackOptions options;
  options.queries_per_turn = 6;
  options.seed = 12;
  PerfectMemoryBackend perfect(Representation::adjacency());
  NbackReport report = nback(graph, {2}, &perfect, options);
  const NbackTurnScore& score = report.per_n.at(2);
  CHECK(report.accuracy(2) ==
        static_cast<double>(score.true_correct + score.false_correct) /
            static_cast<double>(score.queries));
}

TEST_CASE("gec_sweep with an echo backend is all zeros") {
  std::vector<Graph> graphs;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    graphs.push_back(testsupport::ring_graph(100, 200, 1000 + seed));
  }
  ScriptEntry echo;
  echo.echo = true;
  echo.echo_rep = Representation::adjacency();
  echo.uses = -1;
  MockBackend mock({echo});
  auto rows =
      gec_sweep(graphs, {25, 50, 75, 100}, mock, prompts(), {});
  REQUIRE(rows.size() == 4);
  for (const GecSweepRow& row : rows) {
    CHECK(row.mean_edit == 0.0);
    CHECK(row.mean_gec == 0.0);
    CHECK(row.failures == 0);
    CHECK(row.mean_cost > 0.0);
  }
}

TEST_CASE("gec_sweep cost strictly decreases with coarser granularity") {
  std::vector<Graph> graphs;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    graphs.push_back(testsupport::ring_graph(100, 200, 2000 + seed));
  }
  // Fixed per-call token cost: fewer calls, lower cost.
  ScriptEntry echo;
  echo.echo = true;
  echo.echo_rep = Representation::adjacency();
  echo.in_tokens = 100;
  echo.out_tokens = 20;
  echo.uses = -1;
  MockBackend mock({echo});
  auto rows = gec_sweep(graphs, {25, 50, 75, 100}, mock, prompts(), {});
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].mean_cost < rows[i - 1].mean_cost);
  }
  std::string table = gec_sweep_table(rows);
  CHECK(table.find("granularity") != std::string::npos);
}
