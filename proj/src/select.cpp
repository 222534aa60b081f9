#include "msift/select.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>

#include "msift/util.hpp"

namespace msift {

using nlohmann::json;

std::vector<std::string> top_k(const std::unordered_map<std::string, double>& scores,
                               std::size_t k, Direction direction) {
  if (k == 0) throw ValidationError("top_k: k must be positive");
  if (k > scores.size()) {
    throw ValidationError("top_k: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(scores.size()) + " scored ids");
  }
  std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
  std::sort(ranked.begin(), ranked.end(), [direction](const auto& a, const auto& b) {
    if (a.second != b.second) {
      return direction == Direction::kTop ? a.second > b.second : a.second < b.second;
    }
    return a.first < b.first;
  });
  std::vector<std::string> result;
  result.reserve(k);
  for (std::size_t i = 0; i < k; ++i) result.push_back(std::move(ranked[i].first));
  return result;
}

const ResponseEntry& choose_response(const InstructionRecord& record, ResponseStrategy strategy,
                                     const std::string& reward_model, std::uint64_t seed) {
  if (record.responses.empty()) {
    throw ValidationError("record '" + record.id + "': no responses");
  }
  const auto reward_of = [&](const ResponseEntry& r) {
    auto it = r.rewards.find(reward_model);
    if (it == r.rewards.end()) {
      throw ValidationError("record '" + record.id + "': response from '" + r.model_id +
                            "' missing reward key '" + reward_model +
                            "' (available: " + reward_keys_of(r) + ")");
    }
    return it->second;
  };

  // Candidates in an order independent of how the responses were stored.
  std::vector<const ResponseEntry*> candidates;
  candidates.reserve(record.responses.size());
  for (const ResponseEntry& r : record.responses) candidates.push_back(&r);

  if (strategy == ResponseStrategy::kBest) {
    const ResponseEntry* best = candidates.front();
    double best_reward = reward_of(*best);
    for (const ResponseEntry* r : candidates) {
      const double reward = reward_of(*r);
      if (reward > best_reward || (reward == best_reward && r->model_id < best->model_id)) {
        best = r;
        best_reward = reward;
      }
    }
    return *best;
  }

  std::mt19937_64 rng = seeded_rng(seed, record.id);
  if (strategy == ResponseStrategy::kRandom) {
    std::sort(candidates.begin(), candidates.end(),
              [](const ResponseEntry* a, const ResponseEntry* b) { return a->model_id < b->model_id; });
    return *candidates[uniform_index(rng, candidates.size())];
  }

  // top5_random: uniform draw from the min(5, N) highest-reward responses.
  std::sort(candidates.begin(), candidates.end(), [&](const ResponseEntry* a, const ResponseEntry* b) {
    const double ra = reward_of(*a), rb = reward_of(*b);
    if (ra != rb) return ra > rb;
    return a->model_id < b->model_id;
  });
  const std::size_t pool = std::min<std::size_t>(5, candidates.size());
  return *candidates[uniform_index(rng, pool)];
}

std::vector<std::string> random_sample(std::vector<std::string> ids, std::size_t k,
                                       std::uint64_t seed) {
  if (k == 0) throw ValidationError("random selection: k must be positive");
  if (k > ids.size()) {
    throw ValidationError("random selection: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(ids.size()) + " records");
  }
  // Sorting first makes the draw independent of the incoming order.
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng = seeded_rng(seed, "random_baseline");
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, ids.size() - i);
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  return ids;
}

std::vector<std::string> random_baseline(std::span<const InstructionRecord> records,
                                         std::size_t k, std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const InstructionRecord& r : records) ids.push_back(r.id);
  return random_sample(std::move(ids), k, seed);
}

std::vector<std::string> length_baseline(std::span<const InstructionRecord> records,
                                         std::size_t k, Direction direction) {
  if (k == 0) throw ValidationError("length selection: k must be positive");
  if (k > records.size()) {
    throw ValidationError("length selection: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(records.size()) + " records");
  }
  std::vector<std::pair<std::size_t, const std::string*>> ranked;
  ranked.reserve(records.size());
  for (const InstructionRecord& r : records) {
    ranked.emplace_back(whitespace_token_count(r.instruction), &r.id);
  }
  std::sort(ranked.begin(), ranked.end(), [direction](const auto& a, const auto& b) {
    if (a.first != b.first) {
      return direction == Direction::kTop ? a.first > b.first : a.first < b.first;
    }
    return *a.second < *b.second;
  });
  std::vector<std::string> result;
  result.reserve(k);
  for (std::size_t i = 0; i < k; ++i) result.push_back(*ranked[i].second);
  return result;
}

std::string sft_to_jsonl(std::span<const SelectedPair> pairs, const std::string& metric,
                         std::uint64_t seed) {
  std::string out;
  for (const SelectedPair& pair : pairs) {
    if (pair.instruction.empty() || pair.response_text.empty()) {
      throw ValidationError("pair '" + pair.instruction_id +
                            "': instruction and output must be non-empty");
    }
    json meta;
    meta["instruction_id"] = pair.instruction_id;
    meta["response_model"] = pair.response_model;
    meta["metric"] = metric;
    meta["metric_value"] = pair.metric_value ? json(*pair.metric_value) : json(nullptr);
    if (pair.cluster_id) meta["cluster_id"] = *pair.cluster_id;
    meta["strategy"] = pair.strategy;
    meta["seed"] = seed;
    json j;
    j["instruction"] = pair.instruction;
    j["output"] = pair.response_text;
    j["meta"] = std::move(meta);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::size_t emit_sft(std::span<const SelectedPair> pairs, const std::string& metric,
                     std::uint64_t seed, const std::string& path) {
  atomic_write_file(path, sft_to_jsonl(pairs, metric, seed));
  return pairs.size();
}

}  // namespace msift
