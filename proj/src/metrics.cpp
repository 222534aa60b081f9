#include "msift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "msift/util.hpp"

namespace msift {

double difficulty(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("difficulty: no responses");
  const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
  return -sum / static_cast<double>(scores.size());
}

double separability(std::span<const double> scores, bool sample_variance) {
  if (scores.empty()) throw ValidationError("separability: no responses");
  const std::size_t n = scores.size();
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double s : scores) {
    const double d = s - mean;
    ss += d * d;
  }
  if (sample_variance) {
    return n < 2 ? 0.0 : ss / static_cast<double>(n - 1);
  }
  return ss / static_cast<double>(n);
}

RankVector rank_vector(std::span<const double> values, bool higher_is_better) {
  if (values.empty()) throw ValidationError("rank_vector: empty input");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_is_better ? values[a] > values[b] : values[a] < values[b];
  });

  RankVector result;
  result.ranks.assign(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // items order[i..j] are tied; they share the mean of ranks i+1 .. j+1
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) result.ranks[order[t]] = rank;
    i = j + 1;
  }
  return result;
}

std::optional<double> spearman(const RankVector& ra, const RankVector& rb) {
  const std::size_t n = ra.size();
  if (n != rb.size()) throw ValidationError("spearman: rank vectors differ in length");
  if (n < 2) throw ValidationError("spearman: need at least two items");
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += ra.ranks[i];
    mean_b += rb.ranks[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = ra.ranks[i] - mean_a;
    const double db = rb.ranks[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) return std::nullopt;  // an all-tied side
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

namespace {

struct FamilyResponses {
  std::vector<double> sizes;
  std::vector<double> scores;
};

}  // namespace

std::optional<double> try_stability(const InstructionRecord& record, const ModelCatalog& catalog,
                                    const std::string& reward_model) {
  // Group the record's responses by model family; only families contributing
  // two or more responses admit a ranking.
  std::map<std::string, FamilyResponses> by_family;
  for (const ResponseEntry& response : record.responses) {
    const ModelInfo* model = catalog.find(response.model_id);
    if (model == nullptr) {
      throw ValidationError("record '" + record.id + "': response from '" + response.model_id +
                            "' not in catalog");
    }
    auto it = response.rewards.find(reward_model);
    if (it == response.rewards.end()) {
      throw ValidationError("record '" + record.id + "': response from '" + response.model_id +
                            "' missing reward key '" + reward_model +
                            "' (available: " + reward_keys_of(response) + ")");
    }
    FamilyResponses& fam = by_family[model->family];
    fam.sizes.push_back(model->params_b);
    fam.scores.push_back(it->second);
  }

  double sum = 0.0;
  std::size_t contributing = 0;
  for (const auto& [family, responses] : by_family) {
    if (responses.sizes.size() < 2) continue;
    const RankVector size_rank = rank_vector(responses.sizes, /*higher_is_better=*/true);
    const RankVector score_rank = rank_vector(responses.scores, /*higher_is_better=*/true);
    const std::optional<double> factor = spearman(size_rank, score_rank);
    // An all-tied family gives no evidence either way; it counts as 0 so the
    // denominator stays comparable across records.
    sum += factor.value_or(0.0);
    ++contributing;
  }
  if (contributing == 0) return std::nullopt;
  return sum / static_cast<double>(contributing);
}

double stability(const InstructionRecord& record, const ModelCatalog& catalog,
                 const std::string& reward_model) {
  const std::optional<double> value = try_stability(record, catalog, reward_model);
  if (!value) {
    throw ValidationError("stability undefined for record '" + record.id +
                          "': no family contributes two or more responses");
  }
  return *value;
}

std::vector<double> reward_scores(const InstructionRecord& record, const std::string& reward_model) {
  std::vector<double> scores;
  scores.reserve(record.responses.size());
  for (const ResponseEntry& response : record.responses) {
    auto it = response.rewards.find(reward_model);
    if (it == response.rewards.end()) {
      throw ValidationError("record '" + record.id + "': response from '" + response.model_id +
                            "' missing reward key '" + reward_model +
                            "' (available: " + reward_keys_of(response) + ")");
    }
    scores.push_back(it->second);
  }
  return scores;
}

ScoreTable score_dataset(std::span<const InstructionRecord> records, const ModelCatalog& catalog,
                         const std::string& reward_model, int threads, bool sample_variance) {
  ScoreTable table;
  table.rows.resize(records.size());
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const InstructionRecord& record = records[i];
    const std::vector<double> scores = reward_scores(record, reward_model);
    ScoreRow& row = table.rows[i];
    row.instruction_id = record.id;
    row.difficulty = difficulty(scores);
    row.separability = separability(scores, sample_variance);
    row.stability = try_stability(record, catalog, reward_model);
  });
  return table;
}

}  // namespace msift
