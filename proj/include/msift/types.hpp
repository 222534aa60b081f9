#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace msift {

// Error taxonomy. The CLI maps these onto exit codes:
// usage errors 1 (handled by the parser), ValidationError 2, IoError 3,
// RemoteError 4.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RemoteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One generator model: unique id, family name, parameter count in billions.
struct ModelInfo {
  std::string id;
  std::string family;
  double params_b = 0.0;
};

/// Validated set of generator models, grouped by family. Families with at
/// least two members are "rankable": they admit a size-vs-score rank
/// correlation.
class ModelCatalog {
 public:
  ModelCatalog() = default;
  explicit ModelCatalog(std::vector<ModelInfo> models);

  const std::vector<ModelInfo>& models() const { return models_; }
  const ModelInfo* find(const std::string& id) const;
  bool contains(const std::string& id) const { return find(id) != nullptr; }

  const std::map<std::string, std::vector<ModelInfo>>& families() const { return families_; }
  std::size_t rankable_family_count() const;

 private:
  std::vector<ModelInfo> models_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<ModelInfo>> families_;
};

/// One model's response to an instruction, with its per-reward-model scores.
struct ResponseEntry {
  std::string model_id;
  std::string text;
  std::map<std::string, double> rewards;  // reward-model key -> score
};

struct InstructionRecord {
  std::string id;
  std::string instruction;
  std::vector<ResponseEntry> responses;
  std::optional<std::vector<double>> embedding;
};

/// Comma-separated reward keys of a response, for diagnostics.
std::string reward_keys_of(const ResponseEntry& response);

/// Per-instruction metric values. stability is empty when the record has no
/// family with two or more responses; multi is empty until aggregation.
struct ScoreRow {
  std::string instruction_id;
  double difficulty = 0.0;
  double separability = 0.0;
  std::optional<double> stability;
  std::optional<double> multi;
  bool stability_imputed = false;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }
};

enum class Metric { kDifficulty, kSeparability, kStability, kMulti, kRandom, kLength };
enum class Direction { kTop, kBottom };
enum class ResponseStrategy { kBest, kRandom, kTop5Random };

std::string to_string(Metric m);
std::string to_string(Direction d);
std::string to_string(ResponseStrategy s);
Metric metric_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);
ResponseStrategy strategy_from_string(const std::string& s);

/// Per-metric weights for the aggregated multi-metric. Negative weights are
/// legal and flip a metric's contribution.
struct Weights {
  double difficulty = 1.0;
  double separability = 1.0;
  double stability = 2.0;
};

struct SelectionConfig {
  Metric metric = Metric::kMulti;
  Direction direction = Direction::kTop;
  std::size_t k = 1000;
  Weights weights;
  std::size_t n_clusters = 10;  // 0 disables clustering
  ResponseStrategy response_strategy = ResponseStrategy::kBest;
  std::string reward_model;
  std::uint64_t seed = 0;
};

struct ClusterAssignment {
  std::string instruction_id;
  int cluster_id = 0;
};

/// An instruction with its chosen response and selection provenance,
/// ready for SFT emission.
struct SelectedPair {
  std::string instruction_id;
  std::string instruction;
  std::string response_text;
  std::string response_model;
  std::optional<double> metric_value;  // empty for the plain random baseline
  std::optional<int> cluster_id;
  std::string strategy;
};

}  // namespace msift
