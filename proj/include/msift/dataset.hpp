#pragma once

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "msift/types.hpp"

namespace msift {

/// Catalog JSON: {"models": [{"id": str, "family": str, "params_b": number}, ...]}.
ModelCatalog load_catalog(const std::string& path);
ModelCatalog catalog_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const InstructionRecord& record);

/// Parses and validates one dataset object. When a catalog is given, every
/// response's model_id must reference it.
InstructionRecord record_from_json(const nlohmann::json& j, const ModelCatalog* catalog);

struct ReaderStats {
  std::size_t lines = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> diagnostics;  // one entry per rejected line
};

/// Streams InstructionRecords from a JSONL file in file order.
///
/// strict (default): the first invalid line aborts with a ValidationError
/// naming the line. lenient: invalid lines are counted and reported through
/// stats(), and reading continues. Either way every input line ends up
/// accepted or rejected, never silently dropped.
class DatasetReader {
 public:
  DatasetReader(const std::string& path, const ModelCatalog* catalog, bool strict = true);

  std::optional<InstructionRecord> next();

  const ReaderStats& stats() const { return stats_; }
  std::optional<std::size_t> embedding_dim() const { return embedding_dim_; }

 private:
  std::ifstream in_;
  std::string path_;
  const ModelCatalog* catalog_;
  bool strict_;
  ReaderStats stats_;
  std::unordered_set<std::string> seen_ids_;
  std::optional<std::size_t> embedding_dim_;
};

std::vector<InstructionRecord> load_dataset(const std::string& path, const ModelCatalog* catalog,
                                            bool strict = true, ReaderStats* stats_out = nullptr);

std::string dataset_to_jsonl(const std::vector<InstructionRecord>& records);

// ScoreTable JSONL: {"id", "difficulty", "separability", "stability": number|null,
// "multi": number|null}; aggregated rows whose stability was imputed carry
// "stability_imputed": true.
ScoreTable load_score_table(const std::string& path);
std::string score_table_to_jsonl(const ScoreTable& table);

// Assignments JSONL: {"id": str, "cluster": int}.
std::vector<ClusterAssignment> load_assignments(const std::string& path);
std::string assignments_to_jsonl(const std::vector<ClusterAssignment>& assignments);

}  // namespace msift
