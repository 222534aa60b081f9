#include <CLI11.hpp>

#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>
#include <unordered_map>

#include "msift/cluster.hpp"
#include "msift/dataset.hpp"
#include "msift/embed_client.hpp"
#include "msift/manifest.hpp"
#include "msift/metrics.hpp"
#include "msift/normalize.hpp"
#include "msift/select.hpp"
#include "msift/util.hpp"

namespace {

using nlohmann::json;
using namespace msift;

constexpr const char* kApiKeyEnv = "MULTISIFT_API_KEY";

struct GlobalArgs {
  int threads = 0;  // 0 = all hardware threads
  bool quiet = false;
};

int resolved_threads(int flag) {
  if (flag > 0) return flag;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void note(const GlobalArgs& g, const std::string& message) {
  if (!g.quiet) std::cerr << message << "\n";
}

Weights parse_weights(const std::string& text) {
  std::vector<double> parts;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::string piece =
        text.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw ValidationError("--weights: '" + piece + "' is not a number");
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (parts.size() != 3) {
    throw ValidationError("--weights expects three comma-separated numbers "
                          "(difficulty,separability,stability)");
  }
  return Weights{parts[0], parts[1], parts[2]};
}

std::vector<InstructionRecord> read_dataset(const std::string& path, const ModelCatalog* catalog,
                                            bool lenient, const GlobalArgs& g) {
  ReaderStats stats;
  auto records = load_dataset(path, catalog, /*strict=*/!lenient, &stats);
  if (stats.rejected > 0) {
    for (const auto& diagnostic : stats.diagnostics) note(g, "skipped " + diagnostic);
    note(g, path + ": rejected " + std::to_string(stats.rejected) + " of " +
                std::to_string(stats.lines) + " lines");
  }
  return records;
}

// Explicit flag wins; otherwise the key is unambiguous only when the data
// carries exactly one reward model.
std::string resolve_reward_model(const std::string& flag,
                                 const std::vector<InstructionRecord>& records) {
  if (!flag.empty()) return flag;
  if (records.empty() || records.front().responses.empty()) {
    throw ValidationError("cannot infer a reward model from an empty dataset; pass --reward-model");
  }
  const ResponseEntry& first = records.front().responses.front();
  if (first.rewards.size() == 1) return first.rewards.begin()->first;
  throw ValidationError("several reward models present (" + reward_keys_of(first) +
                        "); pass --reward-model");
}

// ---------------------------------------------------------------------------
// embed

struct EmbedArgs {
  std::string input;
  std::string out;
  std::string catalog;
  EmbedConfig cfg;
  bool lenient = false;
};

int run_embed(const EmbedArgs& a, const GlobalArgs& g) {
  ModelCatalog catalog;
  const ModelCatalog* catalog_ptr = nullptr;
  if (!a.catalog.empty()) {
    catalog = load_catalog(a.catalog);
    catalog_ptr = &catalog;
  }
  auto records = read_dataset(a.input, catalog_ptr, a.lenient, g);

  EmbedConfig cfg = a.cfg;
  if (const char* key = std::getenv(kApiKeyEnv); key != nullptr && *key != '\0') {
    cfg.api_key = key;
  }
  const std::size_t fetched = attach_embeddings(records, cfg);
  atomic_write_file(a.out, dataset_to_jsonl(records));

  const json params = {{"command", "embed"}, {"endpoint", cfg.endpoint}, {"lenient", a.lenient}};
  std::vector<std::string> inputs = {a.input};
  if (!a.catalog.empty()) inputs.push_back(a.catalog);
  write_manifest(make_manifest("embed", params, 0, std::move(inputs), {a.out}), a.out);
  note(g, "embedded " + std::to_string(records.size()) + " records (" + std::to_string(fetched) +
              " fetched) -> " + a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string input;
  std::string catalog;
  std::string out;
  std::string reward_model;
  std::string weights = "1,1,2";
  bool lenient = false;
};

int run_score(const ScoreArgs& a, const GlobalArgs& g) {
  const Weights weights = parse_weights(a.weights);
  const ModelCatalog catalog = load_catalog(a.catalog);
  const auto records = read_dataset(a.input, &catalog, a.lenient, g);

  ScoreTable table;
  std::string reward_model = a.reward_model;
  if (!records.empty()) {
    reward_model = resolve_reward_model(a.reward_model, records);
    table = score_dataset(records, catalog, reward_model, g.threads);
    table = aggregate(std::move(table), weights);
  }
  atomic_write_file(a.out, score_table_to_jsonl(table));

  const json params = {{"command", "score"},
                       {"reward_model", reward_model},
                       {"weights", {weights.difficulty, weights.separability, weights.stability}},
                       {"lenient", a.lenient}};
  write_manifest(make_manifest("score", params, 0, {a.input, a.catalog}, {a.out}), a.out);
  note(g, "scored " + std::to_string(table.size()) + " records -> " + a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// select

struct SelectArgs {
  std::string input;
  std::string scores;
  std::string out;
  std::string assignments_out;
  std::string metric = "multi";
  std::string direction = "top";
  std::size_t k = 1000;
  std::size_t clusters = 10;
  std::string strategy = "best";
  std::string reward_model;
  std::uint64_t seed = 0;
  bool lenient = false;
};

int run_select(const SelectArgs& a, const GlobalArgs& g) {
  const Metric metric = metric_from_string(a.metric);
  const Direction direction = direction_from_string(a.direction);
  const ResponseStrategy strategy = strategy_from_string(a.strategy);

  const auto records = read_dataset(a.input, nullptr, a.lenient, g);
  if (records.empty()) throw ValidationError("dataset '" + a.input + "' holds no records");
  std::unordered_map<std::string, const InstructionRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.id, &r);

  const bool needs_scores = metric == Metric::kDifficulty || metric == Metric::kSeparability ||
                            metric == Metric::kStability || metric == Metric::kMulti;

  // Candidate pool and ranking scores. Records whose requested metric has no
  // value (undefined stability) drop out of the pool.
  std::vector<std::string> candidates;
  std::unordered_map<std::string, double> score_map;
  if (needs_scores) {
    if (a.scores.empty()) {
      throw ValidationError("--scores is required for metric '" + a.metric + "'");
    }
    const ScoreTable table = load_score_table(a.scores);
    std::unordered_map<std::string, const ScoreRow*> rows;
    for (const auto& row : table.rows) rows.emplace(row.instruction_id, &row);
    std::size_t undefined = 0;
    for (const auto& record : records) {
      const auto it = rows.find(record.id);
      if (it == rows.end()) {
        throw ValidationError("score table '" + a.scores + "' does not cover id '" + record.id +
                              "'");
      }
      const ScoreRow& row = *it->second;
      std::optional<double> value;
      switch (metric) {
        case Metric::kDifficulty: value = row.difficulty; break;
        case Metric::kSeparability: value = row.separability; break;
        case Metric::kStability: value = row.stability; break;
        default:
          if (!row.multi) {
            throw ValidationError("score table '" + a.scores + "' has no multi value for id '" +
                                  record.id + "'; rescore with aggregation");
          }
          value = row.multi;
      }
      if (!value) {
        ++undefined;
        continue;
      }
      candidates.push_back(record.id);
      score_map.emplace(record.id, *value);
    }
    if (undefined > 0) {
      note(g, "excluded " + std::to_string(undefined) + " records with undefined " + a.metric);
    }
  } else {
    for (const auto& record : records) {
      candidates.push_back(record.id);
      if (metric == Metric::kLength) {
        score_map.emplace(record.id,
                          static_cast<double>(whitespace_token_count(record.instruction)));
      } else {
        // Hidden per-id priority drives the cluster-balanced random draw.
        auto rng = seeded_rng(a.seed, record.id);
        score_map.emplace(record.id, uniform_real01(rng));
      }
    }
  }

  std::vector<std::string> chosen;
  std::vector<ClusterAssignment> assignments;
  std::unordered_map<std::string, int> cluster_of;
  if (a.clusters > 0) {
    std::vector<EmbeddedPoint> points;
    points.reserve(candidates.size());
    for (const auto& id : candidates) {
      const InstructionRecord& record = *by_id.at(id);
      if (!record.embedding) {
        throw ValidationError("record '" + id + "' has no embedding; run embed first");
      }
      points.push_back({id, *record.embedding});
    }
    assignments = kmeans(points, a.clusters, a.seed, 100, 1e-6, g.threads);
    for (const auto& assignment : assignments) {
      cluster_of.emplace(assignment.instruction_id, assignment.cluster_id);
    }
    chosen = balanced_select(assignments, score_map,  a.k,
                             metric == Metric::kRandom ? Direction::kTop : direction);
  } else if (metric == Metric::kRandom) {
    chosen = random_sample(candidates, a.k, a.seed);
  } else {
    chosen = top_k(score_map, a.k, direction);
  }

  if (!a.assignments_out.empty()) {
    if (a.clusters == 0) {
      throw ValidationError("--assignments-out requires --clusters > 0");
    }
    atomic_write_file(a.assignments_out, assignments_to_jsonl(assignments));
  }

  std::string reward_model = a.reward_model;
  if (strategy != ResponseStrategy::kRandom || !a.reward_model.empty()) {
    reward_model = resolve_reward_model(a.reward_model, records);
  }

  std::vector<SelectedPair> pairs;
  pairs.reserve(chosen.size());
  for (const auto& id : chosen) {
    const InstructionRecord& record = *by_id.at(id);
    const ResponseEntry& response = choose_response(record, strategy, reward_model, a.seed);
    SelectedPair pair;
    pair.instruction_id = id;
    pair.instruction = record.instruction;
    pair.response_text = response.text;
    pair.response_model = response.model_id;
    if (metric != Metric::kRandom) pair.metric_value = score_map.at(id);
    if (const auto it = cluster_of.find(id); it != cluster_of.end()) pair.cluster_id = it->second;
    pair.strategy = to_string(strategy);
    pairs.push_back(std::move(pair));
  }
  emit_sft(pairs, a.metric, a.seed, a.out);

  const json params = {{"command", "select"},     {"metric", a.metric},
                       {"direction", a.direction}, {"k", a.k},
                       {"clusters", a.clusters},   {"response_strategy", a.strategy},
                       {"reward_model", reward_model}, {"seed", a.seed},
                       {"lenient", a.lenient}};
  std::vector<std::string> inputs = {a.input};
  if (needs_scores) inputs.push_back(a.scores);
  if (!a.assignments_out.empty()) {
    write_manifest(make_manifest("select", params, a.seed, inputs,
                                 {a.out, a.assignments_out}),
                   a.assignments_out);
  }
  std::vector<std::string> outputs = {a.out};
  if (!a.assignments_out.empty()) outputs.push_back(a.assignments_out);
  write_manifest(make_manifest("select", params, a.seed, std::move(inputs), std::move(outputs)),
                 a.out);
  note(g, "selected " + std::to_string(pairs.size()) + " pairs -> " + a.out);
  return 0;
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string input;
  std::string scores;
  std::string assignments;
  std::string out;
  bool lenient = false;
};

json column_summary(const std::vector<double>& values) {
  if (values.empty()) return nullptr;
  double lo = values.front(), hi = values.front(), mean = 0;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double variance = 0;
  for (double v : values) variance += (v - mean) * (v - mean);
  variance /= static_cast<double>(values.size());

  constexpr int kBins = 20;
  std::vector<std::size_t> counts(kBins, 0);
  const double width = (hi - lo) / kBins;
  for (double v : values) {
    int bin = width > 0 ? static_cast<int>((v - lo) / width) : 0;
    counts[std::min(bin, kBins - 1)]++;
  }
  return json{{"count", values.size()}, {"min", lo},      {"max", hi},
              {"mean", mean},           {"variance", variance},
              {"histogram", {{"lo", lo}, {"hi", hi}, {"counts", counts}}}};
}

int run_stats(const StatsArgs& a, const GlobalArgs& g) {
  if (a.input.empty() && a.scores.empty() && a.assignments.empty()) {
    throw ValidationError("stats needs at least one of --input, --scores, --assignments");
  }
  json report = json::object();
  std::vector<std::string> inputs;

  if (!a.input.empty()) {
    ReaderStats stats;
    const auto records = load_dataset(a.input, nullptr, /*strict=*/!a.lenient, &stats);
    std::size_t responses = 0, embedded = 0;
    std::optional<std::size_t> dim;
    for (const auto& r : records) {
      responses += r.responses.size();
      if (r.embedding) {
        ++embedded;
        dim = r.embedding->size();
      }
    }
    report["dataset"] = {{"records", records.size()},
                         {"responses", responses},
                         {"rejected_lines", stats.rejected},
                         {"embedded", embedded},
                         {"embedding_dim", dim ? json(*dim) : json(nullptr)}};
    inputs.push_back(a.input);
  }

  if (!a.scores.empty()) {
    const ScoreTable table = load_score_table(a.scores);
    std::vector<double> dif, sep, stab, multi;
    std::size_t stability_undefined = 0, imputed = 0;
    for (const auto& row : table.rows) {
      dif.push_back(row.difficulty);
      sep.push_back(row.separability);
      if (row.stability) {
        stab.push_back(*row.stability);
      } else {
        ++stability_undefined;
      }
      if (row.multi) multi.push_back(*row.multi);
      if (row.stability_imputed) ++imputed;
    }
    json metrics;
    metrics["difficulty"] = column_summary(dif);
    metrics["separability"] = column_summary(sep);
    metrics["stability"] = column_summary(stab);
    metrics["stability_undefined"] = stability_undefined;
    metrics["multi"] = column_summary(multi);
    metrics["stability_imputed"] = imputed;
    metrics["rows"] = table.size();
    report["metrics"] = std::move(metrics);
    inputs.push_back(a.scores);
  }

  if (!a.assignments.empty()) {
    const auto assignments = load_assignments(a.assignments);
    std::map<int, std::size_t> sizes;
    for (const auto& assignment : assignments) sizes[assignment.cluster_id]++;
    json size_map = json::object();
    for (const auto& [cluster, count] : sizes) size_map[std::to_string(cluster)] = count;
    report["clusters"] = {{"count", sizes.size()}, {"sizes", std::move(size_map)}};
    inputs.push_back(a.assignments);
  }

  const std::string text = report.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    atomic_write_file(a.out, text);
    const json params = {{"command", "stats"}, {"lenient", a.lenient}};
    write_manifest(make_manifest("stats", params, 0, std::move(inputs), {a.out}), a.out);
    note(g, "report -> " + a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selects compact, high-value subsets of multi-model instruction data"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config")->description("TOML config file; command-line flags win");
  app.require_subcommand(1);

  GlobalArgs global;
  app.add_option("-t,--threads", global.threads, "Worker threads (0 = all hardware threads)")
      ->capture_default_str();
  app.add_flag("-q,--quiet", global.quiet, "Suppress progress messages on stderr");

  EmbedArgs embed_args;
  CLI::App* embed = app.add_subcommand("embed", "Attach instruction embeddings over HTTP");
  embed->fallthrough();
  embed->add_option("-i,--input", embed_args.input, "Dataset JSONL")->required();
  embed->add_option("-o,--out", embed_args.out, "Embedded dataset JSONL")->required();
  embed->add_option("--endpoint", embed_args.cfg.endpoint, "Embedding service URL")->required();
  embed->add_option("--batch-size", embed_args.cfg.batch_size, "Texts per request")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  embed->add_option("--max-retries", embed_args.cfg.max_retries, "Retries per request")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  embed->add_option("--timeout", embed_args.cfg.timeout_s, "Per-request timeout, seconds")
      ->capture_default_str();
  embed->add_option("--workers", embed_args.cfg.workers, "Parallel in-flight batches")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  embed->add_option("--catalog", embed_args.catalog, "Optional model catalog JSON to validate against");
  embed->add_flag("--lenient", embed_args.lenient, "Skip invalid lines instead of aborting");

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "Compute per-instruction metric columns");
  score->fallthrough();
  score->add_option("-i,--input", score_args.input, "Dataset JSONL")->required();
  score->add_option("--catalog", score_args.catalog, "Model catalog JSON")->required();
  score->add_option("-o,--out", score_args.out, "Score table JSONL")->required();
  score->add_option("--reward-model", score_args.reward_model,
                    "Reward key to score under (inferred when only one exists)");
  score->add_option("--weights", score_args.weights,
                    "Aggregation weights difficulty,separability,stability")
      ->capture_default_str();
  score->add_flag("--lenient", score_args.lenient, "Skip invalid lines instead of aborting");

  SelectArgs select_args;
  CLI::App* select = app.add_subcommand("select", "Draw a subset and emit SFT pairs");
  select->fallthrough();
  select->add_option("-i,--input", select_args.input, "Dataset JSONL")->required();
  select->add_option("--scores", select_args.scores, "Score table JSONL from `score`");
  select->add_option("-o,--out", select_args.out, "SFT pairs JSONL")->required();
  select->add_option("--metric", select_args.metric,
                     "difficulty|separability|stability|multi|random|length")
      ->capture_default_str();
  select->add_option("--direction", select_args.direction, "top|bottom")->capture_default_str();
  select->add_option("-k,--k", select_args.k, "Number of pairs to draw")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  select->add_option("--clusters", select_args.clusters, "Cluster count (0 = no clustering)")
      ->capture_default_str();
  select->add_option("--response-strategy", select_args.strategy, "best|random|top5_random")
      ->capture_default_str();
  select->add_option("--reward-model", select_args.reward_model,
                     "Reward key for response choice (inferred when only one exists)");
  select->add_option("--seed", select_args.seed, "PRNG seed")->capture_default_str();
  select->add_option("--assignments-out", select_args.assignments_out,
                     "Also write cluster assignments JSONL here");
  select->add_flag("--lenient", select_args.lenient, "Skip invalid lines instead of aborting");

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "Summarize datasets, score tables, clusters");
  stats->fallthrough();
  stats->add_option("-i,--input", stats_args.input, "Dataset JSONL");
  stats->add_option("--scores", stats_args.scores, "Score table JSONL");
  stats->add_option("--assignments", stats_args.assignments, "Cluster assignments JSONL");
  stats->add_option("-o,--out", stats_args.out, "Write the JSON report here instead of stdout");
  stats->add_flag("--lenient", stats_args.lenient, "Skip invalid lines instead of aborting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the diagnostic
    return 1;
  }

  const GlobalArgs g{resolved_threads(global.threads), global.quiet};
  try {
    if (embed->parsed()) return run_embed(embed_args, g);
    if (score->parsed()) return run_score(score_args, g);
    if (select->parsed()) return run_select(select_args, g);
    if (stats->parsed()) return run_stats(stats_args, g);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const RemoteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
