#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphpipe/benchgen.hpp"
#include "graphpipe/catalog.hpp"
#include "graphpipe/evalharness.hpp"
#include "graphpipe/llm.hpp"
#include "graphpipe/prompts.hpp"
#include "graphpipe/sensory.hpp"
#include "graphpipe/toolset.hpp"

namespace {

using namespace graphpipe;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;

struct BackendConfig {
  std::string backend = "none";  // wire | mock | none
  std::string endpoint;
  std::string model;
  std::string credential_env = "GRAPHPIPE_API_KEY";
  std::string mock_script;
  double timeout_seconds = 60.0;
  int retry_cap = 3;
};

struct BackendBundle {
  std::unique_ptr<ChatBackend> owned;
  std::unique_ptr<RecordingBackend> recording;

  ChatBackend* handle() { return recording ? recording.get() : nullptr; }
};

BackendBundle make_backend(const BackendConfig& cfg) {
  BackendBundle bundle;
  if (cfg.backend == "none") return bundle;
  if (cfg.backend == "mock") {
    if (cfg.mock_script.empty()) {
      fail(Errc::BadConfig, "mock backend requires --mock-script");
    }
    bundle.owned = MockBackend::from_jsonl_file(cfg.mock_script);
  } else if (cfg.backend == "wire") {
    if (cfg.endpoint.empty()) {
      fail(Errc::BadConfig, "wire backend requires --endpoint");
    }
    if (std::getenv(cfg.credential_env.c_str()) == nullptr) {
      fail(Errc::BadConfig,
           "credential environment variable " + cfg.credential_env +
               " is not set");
    }
    WireConfig wire;
    wire.endpoint = cfg.endpoint;
    wire.model = cfg.model;
    wire.credential_env = cfg.credential_env;
    wire.timeout_seconds = cfg.timeout_seconds;
    wire.max_retries = cfg.retry_cap;
    bundle.owned = std::make_unique<WireBackend>(wire);
  } else {
    fail(Errc::BadConfig, "unknown backend: " + cfg.backend);
  }
  bundle.recording = std::make_unique<RecordingBackend>(*bundle.owned);
  return bundle;
}

Representation parse_representation(const std::string& rep,
                                    const std::string& predicate) {
  auto kind = rep_kind_from(rep);
  if (!kind) fail(Errc::BadConfig, "unknown representation: " + rep);
  if (*kind == RepKind::LinguisticDescription) {
    auto pred = predicate_from(predicate);
    if (!pred) {
      fail(Errc::BadConfig,
           "linguistic representation requires --predicate "
           "Linked|Followed|Connected|Cited");
    }
    return Representation::linguistic(*pred);
  }
  return Representation{*kind, {}};
}

Graph load_graph(const std::string& path, bool directed) {
  EdgeListFile file = read_edge_list(path);
  return build_graph(file.edges, directed, file.isolated_nodes);
}

std::map<Domain, Graph> load_sources(const GenConfig& cfg,
                                     const std::string& source_dir) {
  if (source_dir.empty()) return default_sources(cfg);
  std::map<Domain, Graph> sources;
  for (Domain d : cfg.domains) {
    std::string name(domain_name(d));
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    std::string path = source_dir + "/" + name + ".edgelist";
    bool directed = domain_directed_default(d);
    auto it = cfg.directed_override.find(d);
    if (it != cfg.directed_override.end()) directed = it->second;
    sources[d] = load_graph(path, directed);
  }
  return sources;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph reasoning pipeline: benchmark generation, sensory "
               "ingest, tool/model solving, and evaluation harnesses"};
  app.require_subcommand(1);

  BackendConfig backend_cfg;
  std::string config_path;
  std::string prompts_dir;
  std::uint64_t seed = 0;
  std::size_t concurrency = 1;
  std::size_t granularity = 50;
  int max_retries = 3;
  std::int64_t t_max = 4096;

  app.add_option("--config", config_path, "JSON config file; flags override");
  auto* opt_backend =
      app.add_option("--backend", backend_cfg.backend, "wire | mock | none");
  auto* opt_endpoint =
      app.add_option("--endpoint", backend_cfg.endpoint, "chat endpoint URL");
  auto* opt_model = app.add_option("--model", backend_cfg.model, "model name");
  auto* opt_cred = app.add_option("--credential-env", backend_cfg.credential_env,
                                  "env var holding the API key");
  auto* opt_script = app.add_option("--mock-script", backend_cfg.mock_script,
                                    "JSONL script for the mock backend");
  auto* opt_seed = app.add_option("--seed", seed, "root seed");
  auto* opt_conc = app.add_option("--concurrency", concurrency,
                                  "parallel instances / in-flight calls");
  auto* opt_gran =
      app.add_option("--granularity", granularity, "edges per sensory chunk");
  auto* opt_retries =
      app.add_option("--max-retries", max_retries, "verification retries");
  auto* opt_tmax = app.add_option("--t-max", t_max, "token budget per call");
  app.add_option("--prompts", prompts_dir, "prompt template directory");

  // generate
  auto* cmd_generate =
      app.add_subcommand("generate", "produce a benchmark dataset (JSONL)");
  std::string gen_out;
  std::string source_dir;
  std::size_t per_task = 0;
  std::vector<std::size_t> scales;
  std::vector<std::string> domains;
  cmd_generate->add_option("--out", gen_out, "output JSONL path")->required();
  cmd_generate->add_option("--source-dir", source_dir,
                           "directory with <domain>.edgelist files");
  cmd_generate->add_option("--per-task", per_task, "instances per task cell");
  cmd_generate->add_option("--scales", scales, "node-count scales");
  cmd_generate->add_option("--domains", domains, "domains to include");

  // solve
  auto* cmd_solve = app.add_subcommand("solve", "run a dataset end to end");
  std::string dataset_path, report_out, csv_out;
  bool print_table = false;
  std::string ingest_mode = "auto";
  cmd_solve->add_option("--dataset", dataset_path, "JSONL dataset")->required();
  cmd_solve->add_option("--out", report_out, "report JSON path");
  cmd_solve->add_option("--csv", csv_out, "per-instance CSV path");
  cmd_solve->add_option("--ingest-mode", ingest_mode, "auto | fast | sensory");
  cmd_solve->add_flag("--table", print_table, "print the text table");

  // ingest
  auto* cmd_ingest =
      app.add_subcommand("ingest", "sensory pipeline over one graph");
  std::string ingest_graph, ingest_doc, rep_name = "adjacency",
                            predicate_name_arg;
  bool ingest_directed = false;
  cmd_ingest->add_option("--graph", ingest_graph, "edge-list file (source)");
  cmd_ingest->add_option("--doc", ingest_doc,
                         "raw graph text file (overrides rendering)");
  cmd_ingest->add_option("--rep", rep_name,
                         "adjacency | symbolic | linguistic");
  cmd_ingest->add_option("--predicate", predicate_name_arg,
                         "predicate for linguistic form");
  cmd_ingest->add_flag("--directed", ingest_directed, "treat edges as arcs");

  // nback
  auto* cmd_nback = app.add_subcommand("nback", "delayed edge recall harness");
  std::string nback_graph;
  int nback_n = 3;
  std::size_t queries_per_turn = 10;
  std::string nback_rep = "adjacency", nback_predicate;
  bool nback_directed = false;
  cmd_nback->add_option("--graph", nback_graph, "edge-list file")->required();
  cmd_nback->add_option("--n", nback_n, "largest N (runs 1..N)");
  cmd_nback->add_option("--queries-per-turn", queries_per_turn,
                        "balanced queries per turn (even)");
  cmd_nback->add_option("--rep", nback_rep, "chunk representation");
  cmd_nback->add_option("--predicate", nback_predicate,
                        "predicate for linguistic form");
  cmd_nback->add_flag("--directed", nback_directed, "treat edges as arcs");

  // gec-sweep
  auto* cmd_sweep =
      app.add_subcommand("gec-sweep", "granularity sweep over a graph set");
  std::string sweep_dir;
  std::vector<std::size_t> granularities = {25, 50, 75, 100};
  std::string sweep_rep = "adjacency", sweep_predicate;
  bool sweep_directed = false;
  cmd_sweep->add_option("--graphs", sweep_dir, "directory of edge-list files")
      ->required();
  cmd_sweep->add_option("--granularities", granularities,
                        "chunk sizes to sweep")
      ->delimiter(',');
  cmd_sweep->add_option("--rep", sweep_rep, "document representation");
  cmd_sweep->add_option("--predicate", sweep_predicate,
                        "predicate for linguistic form");
  cmd_sweep->add_flag("--directed", sweep_directed, "treat edges as arcs");

  // tools
  auto* cmd_tools = app.add_subcommand("tools", "inspect manifests");
  bool list_tools = false;
  cmd_tools->add_flag("--list", list_tools, "print tool and catalog manifests");

  for (CLI::App* sub : app.get_subcommands(
           [](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    // Config file first, then flags win where given.
    if (!config_path.empty()) {
      json cfg = json::parse(read_text_file(config_path), nullptr, false);
      if (cfg.is_discarded() || !cfg.is_object()) {
        fail(Errc::BadConfig, "config file is not a JSON object");
      }
      if (!opt_backend->count()) backend_cfg.backend = cfg.value("backend", backend_cfg.backend);
      if (!opt_endpoint->count()) backend_cfg.endpoint = cfg.value("endpoint", backend_cfg.endpoint);
      if (!opt_model->count()) backend_cfg.model = cfg.value("model", backend_cfg.model);
      if (!opt_cred->count()) backend_cfg.credential_env = cfg.value("credential_env", backend_cfg.credential_env);
      if (!opt_script->count()) backend_cfg.mock_script = cfg.value("mock_script", backend_cfg.mock_script);
      backend_cfg.timeout_seconds = cfg.value("timeout_seconds", backend_cfg.timeout_seconds);
      backend_cfg.retry_cap = cfg.value("retry_cap", backend_cfg.retry_cap);
      if (!opt_seed->count()) seed = cfg.value("seed", seed);
      if (!opt_conc->count()) concurrency = cfg.value("concurrency", concurrency);
      if (!opt_gran->count()) granularity = cfg.value("granularity", granularity);
      if (!opt_retries->count()) max_retries = cfg.value("max_retries", max_retries);
      if (!opt_tmax->count()) t_max = cfg.value("t_max", t_max);
      if (prompts_dir.empty()) prompts_dir = cfg.value("prompts", prompts_dir);
    }

    PromptLibrary prompts = prompts_dir.empty()
                                ? PromptLibrary::defaults()
                                : PromptLibrary::from_directory(prompts_dir);
    BackendBundle backend = make_backend(backend_cfg);

    if (cmd_generate->parsed()) {
      GenConfig gen_cfg;
      if (!config_path.empty()) {
        gen_cfg = GenConfig::from_json_text(read_text_file(config_path));
      }
      gen_cfg.seed = opt_seed->count() ? seed : gen_cfg.seed;
      gen_cfg.concurrency = opt_conc->count() ? concurrency : gen_cfg.concurrency;
      if (per_task > 0) gen_cfg.per_task_count = per_task;
      if (!scales.empty()) gen_cfg.scales = scales;
      if (!domains.empty()) {
        gen_cfg.domains.clear();
        for (const std::string& name : domains) {
          auto d = domain_from(name);
          if (!d) fail(Errc::BadConfig, "unknown domain: " + name);
          gen_cfg.domains.push_back(*d);
        }
      }
      std::vector<std::string> skipped;
      auto sources = load_sources(gen_cfg, source_dir);
      auto instances = generate(sources, gen_cfg, &skipped);
      write_jsonl(instances, gen_out);
      std::cout << "wrote " << instances.size() << " instances to " << gen_out
                << "\n";
      for (const std::string& entry : skipped) {
        std::cerr << "skipped " << entry << "\n";
      }
      return kExitOk;
    }

    if (cmd_solve->parsed()) {
      auto instances = read_jsonl(dataset_path);
      SuiteOptions options;
      options.concurrency = concurrency;
      options.ingest_mode = ingest_mode;
      options.ingest.granularity = granularity;
      options.ingest.max_retries = max_retries;
      SuiteReport report =
          run_suite(instances, backend.handle(), prompts, options);
      if (!report_out.empty()) {
        write_text_file(report_out, report.to_json() + "\n");
      }
      if (!csv_out.empty()) write_text_file(csv_out, report.records_csv());
      if (print_table || report_out.empty()) std::cout << report.to_table();
      return kExitOk;
    }

    if (cmd_ingest->parsed()) {
      Representation rep = parse_representation(rep_name, predicate_name_arg);
      std::optional<Graph> source;
      std::string document;
      if (!ingest_graph.empty()) {
        source = load_graph(ingest_graph, ingest_directed);
        document = render(source->edges(), rep).text;
      }
      if (!ingest_doc.empty()) document = read_text_file(ingest_doc);
      if (document.empty()) {
        fail(Errc::BadConfig, "ingest needs --graph or --doc");
      }
      IngestOptions options;
      options.granularity = granularity;
      options.max_retries = max_retries;
      options.directed = ingest_directed;
      options.concurrency = concurrency;
      options.fast_path = backend.handle() == nullptr;
      IngestResult result =
          ingest(document, rep, options, backend.handle(), prompts);
      std::cout << "nodes: " << result.graph.node_count()
                << ", edges: " << result.graph.edge_count() << "\n";
      std::cout << "backend calls: " << result.report.backend_calls
                << ", retries: " << result.report.total_retries
                << ", tokens: " << result.report.tokens.total() << "\n";
      if (source) {
        EditDistance edit = edge_set_difference(*source, result.graph);
        std::vector<TokenUsage> usages{result.report.tokens};
        std::cout << "edit distance vs source: " << edit.total << " (added "
                  << edit.added << ", removed " << edit.removed << ")\n";
        std::cout << "gec: "
                  << format_number(gec(edit, usages, GecConfig{t_max})) << "\n";
      }
      return kExitOk;
    }

    if (cmd_nback->parsed()) {
      Graph graph = load_graph(nback_graph, nback_directed);
      NbackOptions options;
      options.queries_per_turn = queries_per_turn;
      options.representation = parse_representation(nback_rep, nback_predicate);
      options.seed = seed;
      std::vector<int> ns;
      for (int n = 1; n <= nback_n; ++n) ns.push_back(n);
      NbackReport report = nback(graph, ns, backend.handle(), options);
      std::cout << report.to_table();
      return kExitOk;
    }

    if (cmd_sweep->parsed()) {
      if (backend.handle() == nullptr) {
        fail(Errc::BadConfig, "gec-sweep needs a mock or wire backend");
      }
      Representation rep = parse_representation(sweep_rep, sweep_predicate);
      std::vector<std::string> files;
      for (const auto& entry : std::filesystem::directory_iterator(sweep_dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path().string());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) {
        fail(Errc::BadConfig, "no graph files in " + sweep_dir);
      }
      std::vector<Graph> graphs;
      for (const std::string& file : files) {
        graphs.push_back(load_graph(file, sweep_directed));
      }
      GecSweepOptions options;
      options.representation = rep;
      options.gec.t_max = t_max;
      options.max_retries = max_retries;
      auto rows = gec_sweep(graphs, granularities, *backend.handle(), prompts,
                            options);
      std::cout << gec_sweep_table(rows);
      return kExitOk;
    }

    if (cmd_tools->parsed()) {
      (void)list_tools;
      std::cout << tool_manifest_json() << "\n";
      std::cout << catalog_manifest_json() << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitUsage;
}
