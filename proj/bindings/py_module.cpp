#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msift/cluster.hpp"
#include "msift/embed_client.hpp"
#include "msift/manifest.hpp"
#include "msift/metrics.hpp"
#include "msift/normalize.hpp"
#include "msift/select.hpp"
#include "msift/types.hpp"
#include "msift/util.hpp"

namespace py = pybind11;
using namespace msift;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Instruction selection core: per-record metrics, rank "
            "normalization, clustering, and budgeted selection.";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<RemoteError>(m, "RemoteError", PyExc_ConnectionError);

  py::class_<ModelInfo>(m, "ModelInfo")
      .def(py::init([](std::string id, std::string family, double params_b) {
             return ModelInfo{std::move(id), std::move(family), params_b};
           }),
           py::arg("id"), py::arg("family"), py::arg("params_b"))
      .def_readwrite("id", &ModelInfo::id)
      .def_readwrite("family", &ModelInfo::family)
      .def_readwrite("params_b", &ModelInfo::params_b)
      .def("__repr__", [](const ModelInfo& info) {
        return "ModelInfo(id='" + info.id + "', family='" + info.family +
               "', params_b=" + std::to_string(info.params_b) + ")";
      });

  py::class_<ModelCatalog>(m, "ModelCatalog")
      .def(py::init<std::vector<ModelInfo>>(), py::arg("models"))
      .def_property_readonly("models", &ModelCatalog::models)
      .def("__contains__", &ModelCatalog::contains)
      .def("__len__", [](const ModelCatalog& c) { return c.models().size(); })
      .def("families", &ModelCatalog::families)
      .def("rankable_family_count", &ModelCatalog::rankable_family_count);

  py::class_<ResponseEntry>(m, "ResponseEntry")
      .def(py::init([](std::string model_id, std::string text,
                       std::map<std::string, double> rewards) {
             return ResponseEntry{std::move(model_id), std::move(text), std::move(rewards)};
           }),
           py::arg("model_id"), py::arg("text"), py::arg("rewards"))
      .def_readwrite("model_id", &ResponseEntry::model_id)
      .def_readwrite("text", &ResponseEntry::text)
      .def_readwrite("rewards", &ResponseEntry::rewards)
      .def("__repr__", [](const ResponseEntry& r) {
        return "ResponseEntry(model_id='" + r.model_id + "')";
      });

  py::class_<InstructionRecord>(m, "InstructionRecord")
      .def(py::init([](std::string id, std::string instruction,
                       std::vector<ResponseEntry> responses,
                       std::optional<std::vector<double>> embedding) {
             return InstructionRecord{std::move(id), std::move(instruction),
                                      std::move(responses), std::move(embedding)};
           }),
           py::arg("id"), py::arg("instruction"),
           py::arg("responses") = std::vector<ResponseEntry>{},
           py::arg("embedding") = std::nullopt)
      .def_readwrite("id", &InstructionRecord::id)
      .def_readwrite("instruction", &InstructionRecord::instruction)
      .def_readwrite("responses", &InstructionRecord::responses)
      .def_readwrite("embedding", &InstructionRecord::embedding)
      .def("__repr__", [](const InstructionRecord& r) {
        return "InstructionRecord(id='" + r.id + "', responses=" +
               std::to_string(r.responses.size()) + ")";
      });

  py::class_<ScoreRow>(m, "ScoreRow")
      .def(py::init<>())
      .def_readwrite("instruction_id", &ScoreRow::instruction_id)
      .def_readwrite("difficulty", &ScoreRow::difficulty)
      .def_readwrite("separability", &ScoreRow::separability)
      .def_readwrite("stability", &ScoreRow::stability)
      .def_readwrite("multi", &ScoreRow::multi)
      .def_readwrite("stability_imputed", &ScoreRow::stability_imputed)
      .def("__repr__", [](const ScoreRow& row) {
        return "ScoreRow(instruction_id='" + row.instruction_id + "')";
      });

  py::class_<Weights>(m, "Weights")
      .def(py::init([](double difficulty, double separability, double stability) {
             return Weights{difficulty, separability, stability};
           }),
           py::arg("difficulty") = 1.0, py::arg("separability") = 1.0,
           py::arg("stability") = 2.0)
      .def_readwrite("difficulty", &Weights::difficulty)
      .def_readwrite("separability", &Weights::separability)
      .def_readwrite("stability", &Weights::stability)
      .def("__repr__", [](const Weights& w) {
        return "Weights(difficulty=" + std::to_string(w.difficulty) +
               ", separability=" + std::to_string(w.separability) +
               ", stability=" + std::to_string(w.stability) + ")";
      });

  // metrics
  m.def("difficulty",
        [](const std::vector<double>& scores) { return difficulty(scores); },
        py::arg("scores"), "Negative mean of the response scores.");
  m.def("separability",
        [](const std::vector<double>& scores, bool sample_variance) {
          return separability(scores, sample_variance);
        },
        py::arg("scores"), py::arg("sample_variance") = false,
        "Variance of the response scores (population divisor by default).");
  m.def("rank_vector",
        [](const std::vector<double>& values, bool higher_is_better) {
          return rank_vector(values, higher_is_better).ranks;
        },
        py::arg("values"), py::arg("higher_is_better") = true,
        "Tie-averaged ranks, 1 = best.");
  m.def("spearman",
        [](const std::vector<double>& ranks_a, const std::vector<double>& ranks_b) {
          return spearman(RankVector{ranks_a}, RankVector{ranks_b});
        },
        py::arg("ranks_a"), py::arg("ranks_b"),
        "Rank correlation of two rank vectors; None when either is fully tied.");
  m.def("stability",
        [](const InstructionRecord& record, const ModelCatalog& catalog,
           const std::string& reward_model) {
          return try_stability(record, catalog, reward_model);
        },
        py::arg("record"), py::arg("catalog"), py::arg("reward_model"),
        "Mean per-family size-vs-score rank correlation; None when no family "
        "contributes two or more responses.");
  m.def("score_dataset",
        [](const std::vector<InstructionRecord>& records, const ModelCatalog& catalog,
           const std::string& reward_model, int threads, bool sample_variance) {
          return score_dataset(records, catalog, reward_model, threads, sample_variance).rows;
        },
        py::arg("records"), py::arg("catalog"), py::arg("reward_model"),
        py::arg("threads") = 1, py::arg("sample_variance") = false,
        py::call_guard<py::gil_scoped_release>(),
        "One ScoreRow per record, in record order; multi left unset.");

  // normalization
  m.def("zscore",
        [](const std::vector<double>& xs) { return zscore(xs); }, py::arg("values"));
  m.def("minmax",
        [](const std::vector<double>& xs) { return minmax(xs); }, py::arg("values"));
  m.def("quantile_transform",
        [](const std::vector<double>& xs) { return quantile_transform(xs); },
        py::arg("values"),
        "Tie-averaged rank position scaled to [0, 1]; 0.5 for a lone value.");
  m.def("normalize_column",
        [](const std::string& name, const std::vector<double>& xs) {
          return normalize_column(name, xs).values;
        },
        py::arg("name"), py::arg("values"),
        "zscore, then minmax, then quantile transform.");
  m.def("aggregate",
        [](std::vector<ScoreRow> rows, const Weights& weights) {
          return aggregate(ScoreTable{std::move(rows)}, weights).rows;
        },
        py::arg("rows"), py::arg("weights") = Weights{},
        "Fills each row's multi with the weighted sum of the normalized "
        "metrics. Rows with unset stability are imputed at 0.5 and flagged.");

  // clustering
  m.def("kmeans",
        [](const std::vector<std::pair<std::string, std::vector<double>>>& points,
           std::size_t k, std::uint64_t seed, std::size_t max_iter, double tol, int threads) {
          std::vector<EmbeddedPoint> embedded;
          embedded.reserve(points.size());
          for (const auto& [id, vec] : points) embedded.push_back({id, vec});
          std::vector<std::pair<std::string, int>> out;
          for (auto& a : kmeans(embedded, k, seed, max_iter, tol, threads)) {
            out.emplace_back(std::move(a.instruction_id), a.cluster_id);
          }
          return out;
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 0,
        py::arg("max_iter") = 100, py::arg("tol") = 1e-6, py::arg("threads") = 1,
        "Seeded k-means over L2-normalized vectors. Returns (id, cluster) "
        "pairs in input order; identical for a fixed seed.");
  m.def("balanced_select",
        [](const std::vector<std::pair<std::string, int>>& assignments,
           const std::unordered_map<std::string, double>& scores, std::size_t budget,
           const std::string& direction) {
          std::vector<ClusterAssignment> converted;
          converted.reserve(assignments.size());
          for (const auto& [id, cluster] : assignments) converted.push_back({id, cluster});
          return balanced_select(converted, scores, budget, direction_from_string(direction));
        },
        py::arg("assignments"), py::arg("scores"), py::arg("budget"),
        py::arg("direction") = "top",
        "Budgeted draw spread evenly over clusters, refilled from the global "
        "ranking when a cluster runs short.");

  // selection
  m.def("top_k",
        [](const std::unordered_map<std::string, double>& scores, std::size_t k,
           const std::string& direction) {
          return top_k(scores, k, direction_from_string(direction));
        },
        py::arg("scores"), py::arg("k"), py::arg("direction") = "top");
  m.def("random_sample",
        [](std::vector<std::string> ids, std::size_t k, std::uint64_t seed) {
          return random_sample(std::move(ids), k, seed);
        },
        py::arg("ids"), py::arg("k"), py::arg("seed") = 0,
        "Uniform draw without replacement; independent of input order.");
  m.def("choose_response",
        [](const InstructionRecord& record, const std::string& strategy,
           const std::string& reward_model, std::uint64_t seed) {
          return choose_response(record, strategy_from_string(strategy), reward_model, seed);
        },
        py::arg("record"), py::arg("strategy") = "best", py::arg("reward_model") = "",
        py::arg("seed") = 0,
        "Picks one response: best, random, or top5_random. Randomized draws "
        "depend only on (seed, record id).");

  // embedding client
  m.def("embed_texts",
        [](const std::vector<std::string>& texts, const std::string& endpoint,
           std::optional<std::string> api_key, std::size_t batch_size, int max_retries,
           double timeout_s, double backoff_base_s, int workers) {
          EmbedConfig cfg;
          cfg.endpoint = endpoint;
          cfg.api_key = std::move(api_key);
          cfg.batch_size = batch_size;
          cfg.max_retries = max_retries;
          cfg.timeout_s = timeout_s;
          cfg.backoff_base_s = backoff_base_s;
          cfg.workers = workers;
          return embed_batch(texts, cfg);
        },
        py::arg("texts"), py::arg("endpoint"), py::arg("api_key") = std::nullopt,
        py::arg("batch_size") = 64, py::arg("max_retries") = 3, py::arg("timeout_s") = 30.0,
        py::arg("backoff_base_s") = 0.5, py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>(),
        "Fetches embeddings in batches with retry on 429 and 5xx.");

  m.def("fnv1a64",
        [](const std::string& data) { return fnv1a64(data); }, py::arg("data"),
        "64-bit FNV-1a hash used for seeding and digests.");
}
