#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphpipe/benchgen.hpp"
#include "graphpipe/catalog.hpp"
#include "graphpipe/evalharness.hpp"
#include "graphpipe/execution.hpp"
#include "graphpipe/llm.hpp"
#include "graphpipe/prompts.hpp"
#include "graphpipe/sensory.hpp"
#include "graphpipe/toolset.hpp"

namespace py = pybind11;
using namespace graphpipe;

namespace {

std::vector<Edge> edges_from_tuples(
    const std::vector<py::tuple>& tuples) {
  std::vector<Edge> edges;
  edges.reserve(tuples.size());
  for (const py::tuple& t : tuples) {
    if (t.size() < 2 || t.size() > 3) {
      throw py::value_error("edge tuples are (u, v) or (u, v, w)");
    }
    Edge e{t[0].cast<NodeId>(), t[1].cast<NodeId>(), std::nullopt};
    if (t.size() == 3 && !t[2].is_none()) e.w = t[2].cast<double>();
    edges.push_back(e);
  }
  return edges;
}

std::vector<py::tuple> edges_to_tuples(const std::vector<Edge>& edges) {
  std::vector<py::tuple> out;
  out.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.w) {
      out.push_back(py::make_tuple(e.u, e.v, *e.w));
    } else {
      out.push_back(py::make_tuple(e.u, e.v));
    }
  }
  return out;
}

Representation rep_from_strings(const std::string& kind,
                                const std::string& predicate) {
  auto k = rep_kind_from(kind);
  if (!k) throw py::value_error("unknown representation kind: " + kind);
  if (*k == RepKind::LinguisticDescription) {
    auto p = predicate_from(predicate);
    if (!p) throw py::value_error("linguistic form needs a predicate");
    return Representation::linguistic(*p);
  }
  return Representation{*k, {}};
}

}  // namespace

PYBIND11_MODULE(_graphpipe, m) {
  m.doc() = "graph reasoning pipeline core";

  py::register_exception<Error>(m, "PipelineError");

  py::class_<Graph>(m, "Graph")
      .def(py::init([](const std::vector<py::tuple>& edges, bool directed,
                       const std::vector<NodeId>& isolated) {
             return build_graph(edges_from_tuples(edges), directed, isolated);
           }),
           py::arg("edges"), py::arg("directed") = false,
           py::arg("isolated_nodes") = std::vector<NodeId>{})
      .def_property_readonly("directed", &Graph::directed)
      .def_property_readonly("weighted", &Graph::weighted)
      .def_property_readonly("nodes", &Graph::nodes)
      .def_property_readonly(
          "edges", [](const Graph& g) { return edges_to_tuples(g.edges()); })
      .def("node_count", &Graph::node_count)
      .def("edge_count", &Graph::edge_count)
      .def("has_node", &Graph::has_node)
      .def("has_edge", &Graph::has_edge)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "Graph(nodes=" + std::to_string(g.node_count()) +
               ", edges=" + std::to_string(g.edge_count()) +
               (g.directed() ? ", directed" : "") + ")";
      });

  py::class_<EditDistance>(m, "EditDistance")
      .def_readonly("added", &EditDistance::added)
      .def_readonly("removed", &EditDistance::removed)
      .def_readonly("total", &EditDistance::total);

  m.def("edit_distance", &edit_distance, py::arg("g"), py::arg("h"));
  m.def(
      "sample_subgraph",
      [](const Graph& source, std::size_t target_nodes, double p_restart,
         std::uint64_t seed) {
        SampledGraph s =
            sample_subgraph(source, target_nodes, BiasParams{p_restart}, seed);
        return py::make_tuple(s.graph, s.original_ids, s.complete);
      },
      py::arg("source"), py::arg("target_nodes"), py::arg("p_restart") = 0.15,
      py::arg("seed") = 0);
  m.def(
      "gec",
      [](std::size_t edit_total, std::int64_t input_tokens,
         std::int64_t output_tokens, std::int64_t t_max) {
        EditDistance edit{0, 0, edit_total};
        std::vector<TokenUsage> usages{{input_tokens, output_tokens}};
        return gec(edit, usages, GecConfig{t_max});
      },
      py::arg("edit_total"), py::arg("input_tokens"), py::arg("output_tokens"),
      py::arg("t_max") = 4096);

  m.def(
      "render",
      [](const std::vector<py::tuple>& edges, const std::string& kind,
         const std::string& predicate) {
        return render(edges_from_tuples(edges),
                      rep_from_strings(kind, predicate))
            .text;
      },
      py::arg("edges"), py::arg("kind") = "adjacency",
      py::arg("predicate") = "");
  m.def(
      "parse",
      [](const std::string& text, const std::string& kind,
         const std::string& predicate) {
        return edges_to_tuples(
            parse_any(text, rep_from_strings(kind, predicate)));
      },
      py::arg("text"), py::arg("kind") = "adjacency", py::arg("predicate") = "");

  py::class_<GraphStore>(m, "GraphStore")
      .def_property_readonly("graph", &GraphStore::canonical)
      .def("matrix",
           [](const GraphStore& s) {
             const MatrixView& m = s.matrix();
             py::dict out;
             out["n"] = m.n;
             out["dense"] = m.dense;
             if (m.dense) {
               out["values"] = m.values;
             } else {
               std::vector<py::tuple> entries;
               for (const auto& e : m.entries) {
                 entries.push_back(py::make_tuple(e.row, e.col, e.value));
               }
               out["entries"] = entries;
             }
             return out;
           })
      .def("edge_index",
           [](const GraphStore& s) {
             const EdgeIndexView& v = s.edge_index();
             return py::make_tuple(v.sources, v.targets, v.weights);
           })
      .def("neighbors", [](const GraphStore& s, NodeId v) {
        std::vector<NodeId> out;
        for (const auto& nb : s.topology().out[s.topology().row_of(v)]) {
          out.push_back(nb.id);
        }
        return out;
      });

  m.def(
      "build_store",
      [](const Graph& g, const std::optional<std::vector<std::vector<double>>>&
                             features,
         const std::vector<int>& labels, bool normalize_features) {
        std::optional<FeatureTable> table;
        if (features) table = FeatureTable{*features};
        return build_views(g, std::move(table), labels, normalize_features);
      },
      py::arg("graph"), py::arg("features") = std::nullopt,
      py::arg("labels") = std::vector<int>{},
      py::arg("normalize_features") = true);

  // toolset
  m.def("edge_existence", &edge_existence);
  m.def("node_existence", &node_existence);
  m.def("edge_count", &edge_count);
  m.def("node_count", &node_count);
  m.def("degree_count", [](const GraphStore& s, NodeId v) {
    return degree_count(s, v);
  });
  m.def("cycle_detection", &cycle_detection);
  m.def("triangle_count", &triangle_count);
  m.def("path_existence", &path_existence);
  m.def("shortest_path", [](const GraphStore& s, NodeId a, NodeId b) {
    PathResult r = shortest_path(s, a, b);
    return py::make_tuple(r.reachable, r.distance, r.path);
  });

  // catalog
  m.def("max_flow", &max_flow);
  m.def("diameter", [](const GraphStore& s) {
    DiameterResult r = diameter(s);
    return py::make_tuple(r.connected, r.value);
  });
  m.def("max_core", &max_core);
  m.def("connected_components", &connected_components);
  m.def(
      "common_neighbors",
      [](const GraphStore& s, NodeId u, NodeId v, const std::string& direction) {
        return common_neighbors(s, u, v,
                                direction == "out"
                                    ? NeighborDirection::Out
                                    : NeighborDirection::Undirected);
      },
      py::arg("store"), py::arg("u"), py::arg("v"),
      py::arg("direction") = "undirected");
  m.def(
      "pagerank",
      [](const GraphStore& s, double damping, double tol, int max_iter) {
        PageRankResult r = pagerank(s, damping, tol, max_iter);
        py::dict scores;
        for (std::size_t i = 0; i < r.scores.size(); ++i) {
          scores[py::int_(s.topology().node_ids[i])] = r.scores[i];
        }
        return py::make_tuple(scores, r.converged, r.iterations);
      },
      py::arg("store"), py::arg("damping") = 0.85, py::arg("tol") = 1e-10,
      py::arg("max_iter") = 200);
  m.def("clustering_coefficient", &clustering_coefficient);

  m.def("tool_manifest", &tool_manifest_json);
  m.def("catalog_manifest", &catalog_manifest_json);

  // benchmark generation and evaluation with the fallback (no-LLM) path
  m.def(
      "generate_dataset",
      [](std::uint64_t seed, std::size_t per_task,
         const std::vector<std::size_t>& scales, const std::string& out_path) {
        GenConfig cfg;
        cfg.seed = seed;
        cfg.per_task_count = per_task;
        cfg.scales = scales;
        auto instances = generate(default_sources(cfg), cfg);
        write_jsonl(instances, out_path);
        return instances.size();
      },
      py::arg("seed") = 0, py::arg("per_task") = 2,
      py::arg("scales") = std::vector<std::size_t>{40},
      py::arg("out_path") = std::string("dataset.jsonl"));
  m.def(
      "solve_dataset",
      [](const std::string& dataset_path, std::size_t concurrency) {
        auto instances = read_jsonl(dataset_path);
        SuiteOptions options;
        options.concurrency = concurrency;
        PromptLibrary prompts = PromptLibrary::defaults();
        SuiteReport report = run_suite(instances, nullptr, prompts, options);
        py::dict out;
        out["instances"] = report.instances;
        out["correct"] = report.correct;
        py::dict per_task;
        for (const auto& [kind, score] : report.per_task) {
          per_task[py::str(std::string(task_kind_name(kind)))] =
              py::make_tuple(score.correct, score.total);
        }
        out["per_task"] = per_task;
        if (report.mae) out["mae"] = *report.mae;
        return out;
      },
      py::arg("dataset_path"), py::arg("concurrency") = 1);
}
