#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "graphpipe/benchgen.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace graphpipe;
using testsupport::throws_code;

namespace {

GenConfig desk_config(std::uint64_t seed = 11, std::size_t per_task = 2) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.per_task_count = per_task;
  cfg.scales = {40};
  cfg.source_nodes = 400;
  return cfg;
}

}  // namespace

TEST_CASE("kind metadata is consistent") {
  CHECK(all_task_kinds().size() == 21);
  CHECK(all_domains().size() == 4);

  int in_toolset = 0, exclusive = 0;
  for (TaskKind kind : all_task_kinds()) {
    if (kind_in_toolset(kind)) ++in_toolset;
    int valid_domains = 0;
    for (Domain d : all_domains()) {
      if (kind_valid_for_domain(kind, d)) ++valid_domains;
    }
    CHECK((valid_domains == 1 || valid_domains == 4));
    if (valid_domains == 1) ++exclusive;
  }
  CHECK(in_toolset == 9);
  CHECK(exclusive == 12);  // 8 out-toolset algorithmic + 4 predictive

  CHECK(kind_metric(TaskKind::TrafficPrediction) == Metric::MAE);
  CHECK(kind_metric(TaskKind::ShortestPath) == Metric::Accuracy);
  CHECK(domain_predicate(Domain::Web) == Predicate::Linked);
  CHECK(domain_predicate(Domain::Social) == Predicate::Followed);
  CHECK(domain_predicate(Domain::Transportation) == Predicate::Connected);
  CHECK(domain_predicate(Domain::Citation) == Predicate::Cited);
}

TEST_CASE("synthetic sources look like their domain") {
  Graph social = make_synthetic_source(Domain::Social, 400, 3, false);
  CHECK(social.node_count() == 400);
  CHECK_FALSE(social.directed());
  CHECK(oracles::component_count(social) == 1);

  // Heavy tail: the hubs clearly beat the mean degree.
  std::int64_t max_degree = 0;
  for (NodeId v : social.nodes()) {
    max_degree = std::max(max_degree, oracles::degree(social, v));
  }
  double mean_degree =
      2.0 * static_cast<double>(social.edge_count()) / 400.0;
  CHECK(static_cast<double>(max_degree) > 3.0 * mean_degree);

  Graph web = make_synthetic_source(Domain::Web, 300, 3, true);
  CHECK(web.directed());
  GraphStore store = build_views(web);
  CHECK(oracles::has_cycle_directed(web));
}

TEST_CASE("generation is deterministic and concurrency independent") {
  GenConfig cfg = desk_config();
  auto sources = default_sources(cfg);
  std::string first = to_jsonl(generate(sources, cfg));
  std::string second = to_jsonl(generate(sources, cfg));
  CHECK(first == second);

  GenConfig parallel_cfg = cfg;
  parallel_cfg.concurrency = 4;
  std::string third = to_jsonl(generate(sources, parallel_cfg));
  CHECK(first == third);

  GenConfig other_seed = cfg;
  other_seed.seed = cfg.seed + 1;
  CHECK(to_jsonl(generate(sources, other_seed)) != first);
}

TEST_CASE("desk generation covers every kind with exclusivity intact") {
  GenConfig cfg = desk_config(21, 5);
  auto sources = default_sources(cfg);
  auto instances = generate(sources, cfg);
  CHECK(instances.size() == 21 * 5);

  std::map<TaskKind, std::size_t> per_kind;
  for (const TaskInstance& inst : instances) {
    ++per_kind[inst.task_kind];
    CHECK(kind_valid_for_domain(inst.task_kind, inst.domain));
    CHECK(inst.scale == 40);
    CHECK(inst.graph_ref.node_count() == 40);
    CHECK_FALSE(inst.ground_truth.empty());
    CHECK((inst.metric == Metric::MAE) ==
          (inst.task_kind == TaskKind::TrafficPrediction));
  }
  CHECK(per_kind.size() == 21);
  for (const auto& [kind, count] : per_kind) CHECK(count == 5);
}

TEST_CASE("domain restriction drops foreign exclusive kinds") {
  GenConfig cfg = desk_config(5, 2);
  cfg.domains = {Domain::Social};
  auto sources = default_sources(cfg);
  auto instances = generate(sources, cfg);
  std::set<TaskKind> kinds;
  for (const TaskInstance& inst : instances) {
    CHECK(inst.domain == Domain::Social);
    kinds.insert(inst.task_kind);
  }
  CHECK(kinds.count(TaskKind::MaxCore) == 1);
  CHECK(kinds.count(TaskKind::ConnectedComponents) == 1);
  CHECK(kinds.count(TaskKind::LinkPredictionSocial) == 1);
  CHECK(kinds.count(TaskKind::MaxFlow) == 0);  // Transportation-exclusive
  CHECK(kinds.count(TaskKind::PageRank) == 0);
  CHECK(kinds.size() == 9 + 3);
}

TEST_CASE("ground truth re-verifies under a second solve") {
  GenConfig cfg = desk_config(31, 2);
  auto instances = generate(default_sources(cfg), cfg);
  for (const TaskInstance& inst : instances) {
    if (inst.metric == Metric::MAE) continue;  // truth is a held-out value
    CAPTURE(inst.id);
    CHECK(solve_reference(inst, cfg.predictive) == inst.ground_truth);
  }
}

TEST_CASE("graph text parses back to the reference edges") {
  GenConfig cfg = desk_config(41, 1);
  auto instances = generate(default_sources(cfg), cfg);
  for (const TaskInstance& inst : instances) {
    auto parsed = parse_any(inst.graph_text, inst.representation);
    REQUIRE(parsed.size() == inst.graph_ref.edge_count());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      CHECK(parsed[i] == inst.graph_ref.edges()[i]);
    }
    if (inst.representation.kind == RepKind::LinguisticDescription) {
      CHECK(inst.representation.predicate == domain_predicate(inst.domain));
    }
  }
}

TEST_CASE("weighted kinds draw integer weights; others stay unweighted") {
  GenConfig cfg = desk_config(51, 2);
  auto instances = generate(default_sources(cfg), cfg);
  for (const TaskInstance& inst : instances) {
    CHECK(inst.graph_ref.weighted() == kind_needs_weights(inst.task_kind));
    if (inst.graph_ref.weighted()) {
      for (const Edge& e : inst.graph_ref.edges()) {
        REQUIRE(e.w.has_value());
        CHECK(*e.w == std::floor(*e.w));
        CHECK(*e.w >= 1.0);
        CHECK(*e.w <= 10.0);
      }
    }
  }
}

TEST_CASE("traffic instances carry raw series and a held-out truth") {
  GenConfig cfg = desk_config(61, 3);
  cfg.domains = {Domain::Transportation};
  auto instances = generate(default_sources(cfg), cfg);
  bool saw_traffic = false;
  for (const TaskInstance& inst : instances) {
    if (inst.task_kind != TaskKind::TrafficPrediction) continue;
    saw_traffic = true;
    REQUIRE(inst.features.has_value());
    CHECK(inst.features->rows.size() == inst.graph_ref.node_count());
    CHECK(inst.metric == Metric::MAE);
    CHECK(parse_number(inst.ground_truth).has_value());
  }
  CHECK(saw_traffic);
}

TEST_CASE("node classification hides only the queried label") {
  GenConfig cfg = desk_config(71, 3);
  cfg.domains = {Domain::Citation};
  auto instances = generate(default_sources(cfg), cfg);
  bool saw = false;
  for (const TaskInstance& inst : instances) {
    if (inst.task_kind != TaskKind::NodeClassification) continue;
    saw = true;
    REQUIRE(inst.labels.size() == inst.graph_ref.node_count());
    NodeId queried = static_cast<NodeId>(*parse_number(inst.args.at("v")));
    std::size_t hidden = 0;
    for (std::size_t i = 0; i < inst.labels.size(); ++i) {
      if (inst.labels[i] < 0) {
        ++hidden;
        CHECK(inst.graph_ref.nodes()[i] == queried);
      }
    }
    CHECK(hidden == 1);
  }
  CHECK(saw);
}

TEST_CASE("jsonl round trip preserves every field") {
  namespace fs = std::filesystem;
  GenConfig cfg = desk_config(81, 1);
  auto instances = generate(default_sources(cfg), cfg);
  fs::path path = fs::temp_directory_path() / "graphpipe_dataset_test.jsonl";
  write_jsonl(instances, path.string());
  auto loaded = read_jsonl(path.string());
  REQUIRE(loaded.size() == instances.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const TaskInstance& a = instances[i];
    const TaskInstance& b = loaded[i];
    CHECK(a.id == b.id);
    CHECK(a.domain == b.domain);
    CHECK(a.scale == b.scale);
    CHECK(a.task_kind == b.task_kind);
    CHECK(a.representation == b.representation);
    CHECK(a.question == b.question);
    CHECK(a.graph_text == b.graph_text);
    CHECK(a.graph_ref == b.graph_ref);
    CHECK(a.args == b.args);
    CHECK(a.ground_truth == b.ground_truth);
    CHECK((a.metric == b.metric));
    CHECK(a.features.has_value() == b.features.has_value());
    if (a.features) CHECK(a.features->rows == b.features->rows);
    CHECK(a.labels == b.labels);
  }
  // Serialized form is stable across a write/read/write cycle.
  CHECK(to_jsonl(instances) == to_jsonl(loaded));
  fs::remove(path);
}

TEST_CASE("jsonl schema violations carry the line number") {
  try {
    parse_jsonl("{\"id\": \"x\"}\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaViolation);
    CHECK(e.index() == 1);
  }
  try {
    parse_jsonl("this is not json\n");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SchemaViolation);
  }
  CHECK(parse_jsonl("").empty());
  CHECK(parse_jsonl("\n  \n").empty());
}

TEST_CASE("generation rejects undersized sources") {
  GenConfig cfg = desk_config();
  cfg.scales = {40};
  std::map<Domain, Graph> tiny;
  for (Domain d : cfg.domains) {
    tiny[d] = testsupport::ring_graph(10, 0, 1);
  }
  CHECK(throws_code(Errc::SourceTooSmall, [&] { generate(tiny, cfg); }));
}

TEST_CASE("config parsing from JSON") {
  GenConfig cfg = GenConfig::from_json_text(R"({
    "seed": 42,
    "per_task_count": 3,
    "scales": [40, 100],
    "domains": ["Social", "Web"],
    "representation_mix": {"AdjacencyList": 1.0, "SymbolicNotation": 0.0,
                            "LinguisticDescription": 0.0},
    "link_threshold": 2
  })");
  CHECK(cfg.seed == 42);
  CHECK(cfg.per_task_count == 3);
  CHECK(cfg.scales == std::vector<std::size_t>{40, 100});
  CHECK(cfg.domains.size() == 2);
  CHECK(cfg.predictive.link_threshold == 2);
  CHECK(throws_code(Errc::BadConfig,
                    [] { GenConfig::from_json_text("[]"); }));
}
