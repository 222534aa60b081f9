#include "msift/dataset.hpp"

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "msift/util.hpp"

namespace msift {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& context) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ValidationError(context.empty() ? "malformed JSON" : context + ": malformed JSON");
  }
  return j;
}

const json& require_field(const json& j, const char* key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(context + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& context) {
  const json& v = require_field(j, key, context);
  if (!v.is_string()) {
    throw ValidationError(context + ": field '" + std::string(key) + "' must be a string");
  }
  return v.get<std::string>();
}

double require_number(const json& v, const std::string& context) {
  if (!v.is_number()) {
    throw ValidationError(context + ": expected a number");
  }
  return v.get<double>();
}

}  // namespace

ModelCatalog catalog_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("catalog: top level must be an object");
  const json& models_json = require_field(j, "models", "catalog");
  if (!models_json.is_array()) throw ValidationError("catalog: 'models' must be an array");
  std::vector<ModelInfo> models;
  models.reserve(models_json.size());
  std::size_t index = 0;
  for (const json& mj : models_json) {
    const std::string context = "catalog model #" + std::to_string(index);
    if (!mj.is_object()) throw ValidationError(context + ": must be an object");
    ModelInfo info;
    info.id = require_string(mj, "id", context);
    info.family = require_string(mj, "family", context);
    info.params_b = require_number(require_field(mj, "params_b", context), context + " params_b");
    models.push_back(std::move(info));
    ++index;
  }
  return ModelCatalog(std::move(models));
}

ModelCatalog load_catalog(const std::string& path) {
  return catalog_from_json(parse_json(read_file(path), "catalog '" + path + "'"));
}

json record_to_json(const InstructionRecord& record) {
  json j;
  j["id"] = record.id;
  j["instruction"] = record.instruction;
  json responses = json::array();
  for (const ResponseEntry& r : record.responses) {
    json rj;
    rj["model"] = r.model_id;
    rj["text"] = r.text;
    rj["rewards"] = r.rewards;
    responses.push_back(std::move(rj));
  }
  j["responses"] = std::move(responses);
  if (record.embedding) {
    j["embedding"] = *record.embedding;
  }
  return j;
}

InstructionRecord record_from_json(const json& j, const ModelCatalog* catalog) {
  if (!j.is_object()) throw ValidationError("record: must be an object");
  InstructionRecord record;
  record.id = require_string(j, "id", "record");
  const std::string context = "record '" + record.id + "'";
  if (record.id.empty()) throw ValidationError("record: empty id");
  record.instruction = require_string(j, "instruction", context);
  if (record.instruction.empty()) throw ValidationError(context + ": empty instruction");

  const json& responses_json = require_field(j, "responses", context);
  if (!responses_json.is_array() || responses_json.empty()) {
    throw ValidationError(context + ": 'responses' must be a non-empty array");
  }
  std::set<std::string> expected_keys;
  std::set<std::string> seen_models;
  for (const json& rj : responses_json) {
    if (!rj.is_object()) throw ValidationError(context + ": responses must be objects");
    ResponseEntry entry;
    entry.model_id = require_string(rj, "model", context);
    const std::string rcontext = context + ", response from '" + entry.model_id + "'";
    entry.text = require_string(rj, "text", rcontext);
    const json& rewards_json = require_field(rj, "rewards", rcontext);
    if (!rewards_json.is_object() || rewards_json.empty()) {
      throw ValidationError(rcontext + ": 'rewards' must be a non-empty object");
    }
    for (auto it = rewards_json.begin(); it != rewards_json.end(); ++it) {
      entry.rewards[it.key()] = require_number(it.value(), rcontext + " reward '" + it.key() + "'");
    }
    if (!seen_models.insert(entry.model_id).second) {
      throw ValidationError(context + ": multiple responses from model '" + entry.model_id + "'");
    }
    if (catalog != nullptr && !catalog->contains(entry.model_id)) {
      throw ValidationError(rcontext + ": model not in catalog");
    }
    std::set<std::string> keys;
    for (const auto& [key, value] : entry.rewards) keys.insert(key);
    if (record.responses.empty()) {
      expected_keys = keys;
    } else if (keys != expected_keys) {
      throw ValidationError(context + ": reward-model keys differ between responses");
    }
    record.responses.push_back(std::move(entry));
  }

  if (auto it = j.find("embedding"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->empty()) {
      throw ValidationError(context + ": 'embedding' must be a non-empty array");
    }
    std::vector<double> vec;
    vec.reserve(it->size());
    for (const json& v : *it) vec.push_back(require_number(v, context + " embedding"));
    record.embedding = std::move(vec);
  }
  return record;
}

DatasetReader::DatasetReader(const std::string& path, const ModelCatalog* catalog, bool strict)
    : in_(path, std::ios::binary), path_(path), catalog_(catalog), strict_(strict) {
  if (!in_) throw IoError("cannot open dataset '" + path + "'");
}

std::optional<InstructionRecord> DatasetReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    const std::size_t line_no = ++stats_.lines;
    const std::string where = path_ + ":" + std::to_string(line_no);
    try {
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        throw ValidationError("blank line");
      }
      InstructionRecord record = record_from_json(parse_json(line, ""), catalog_);
      if (!seen_ids_.insert(record.id).second) {
        throw ValidationError("duplicate record id '" + record.id + "'");
      }
      if (record.embedding) {
        if (!embedding_dim_) {
          embedding_dim_ = record.embedding->size();
        } else if (record.embedding->size() != *embedding_dim_) {
          throw ValidationError("record '" + record.id + "': embedding dimension " +
                                std::to_string(record.embedding->size()) + " != dataset-wide " +
                                std::to_string(*embedding_dim_));
        }
      }
      ++stats_.accepted;
      return record;
    } catch (const ValidationError& e) {
      ++stats_.rejected;
      const std::string message = where + ": " + e.what();
      if (strict_) throw ValidationError(message);
      stats_.diagnostics.push_back(message);
    }
  }
  return std::nullopt;
}

std::vector<InstructionRecord> load_dataset(const std::string& path, const ModelCatalog* catalog,
                                            bool strict, ReaderStats* stats_out) {
  DatasetReader reader(path, catalog, strict);
  std::vector<InstructionRecord> records;
  while (auto record = reader.next()) {
    records.push_back(std::move(*record));
  }
  if (stats_out != nullptr) *stats_out = reader.stats();
  return records;
}

std::string dataset_to_jsonl(const std::vector<InstructionRecord>& records) {
  std::string out;
  for (const InstructionRecord& record : records) {
    out += record_to_json(record).dump();
    out += '\n';
  }
  return out;
}

ScoreTable load_score_table(const std::string& path) {
  const std::string text = read_file(path);
  ScoreTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      throw ValidationError(where + ": blank line");
    }
    json j = parse_json(line, where);
    ScoreRow row;
    row.instruction_id = require_string(j, "id", where);
    if (!seen.insert(row.instruction_id).second) {
      throw ValidationError(where + ": duplicate id '" + row.instruction_id + "'");
    }
    row.difficulty = require_number(require_field(j, "difficulty", where), where + " difficulty");
    row.separability =
        require_number(require_field(j, "separability", where), where + " separability");
    if (row.separability < 0.0) {
      throw ValidationError(where + ": separability must be non-negative");
    }
    const json& stab = require_field(j, "stability", where);
    if (!stab.is_null()) {
      row.stability = require_number(stab, where + " stability");
      if (*row.stability < -1.0 || *row.stability > 1.0) {
        throw ValidationError(where + ": stability must lie in [-1, 1]");
      }
    }
    if (auto it = j.find("multi"); it != j.end() && !it->is_null()) {
      row.multi = require_number(*it, where + " multi");
    }
    if (auto it = j.find("stability_imputed"); it != j.end() && it->is_boolean()) {
      row.stability_imputed = it->get<bool>();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string score_table_to_jsonl(const ScoreTable& table) {
  std::string out;
  for (const ScoreRow& row : table.rows) {
    json j;
    j["id"] = row.instruction_id;
    j["difficulty"] = row.difficulty;
    j["separability"] = row.separability;
    j["stability"] = row.stability ? json(*row.stability) : json(nullptr);
    j["multi"] = row.multi ? json(*row.multi) : json(nullptr);
    if (row.stability_imputed) j["stability_imputed"] = true;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ClusterAssignment> load_assignments(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<ClusterAssignment> assignments;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    json j = parse_json(line, where);
    ClusterAssignment a;
    a.instruction_id = require_string(j, "id", where);
    const json& cluster = require_field(j, "cluster", where);
    if (!cluster.is_number_integer() || cluster.get<long long>() < 0) {
      throw ValidationError(where + ": 'cluster' must be a non-negative integer");
    }
    a.cluster_id = cluster.get<int>();
    assignments.push_back(std::move(a));
  }
  return assignments;
}

std::string assignments_to_jsonl(const std::vector<ClusterAssignment>& assignments) {
  std::string out;
  for (const ClusterAssignment& a : assignments) {
    json j;
    j["id"] = a.instruction_id;
    j["cluster"] = a.cluster_id;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace msift
