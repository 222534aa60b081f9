#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "msift/types.hpp"

namespace msift {

/// First k ids by score: descending for top, ascending for bottom, ties by
/// lexicographic id. top_k(k) is always a prefix of top_k(k+1).
std::vector<std::string> top_k(const std::unordered_map<std::string, double>& scores,
                               std::size_t k, Direction direction);

/// Picks one response per the strategy. best: highest reward (ties to the
/// lexicographically smaller model_id). random: uniform over all responses.
/// top5_random: uniform over the min(5, N) highest-reward responses.
/// Randomized draws seed a PRNG from (seed, instruction_id), so the choice
/// does not depend on dataset or response ordering.
const ResponseEntry& choose_response(const InstructionRecord& record, ResponseStrategy strategy,
                                     const std::string& reward_model, std::uint64_t seed);

/// Uniform sample of k record ids without replacement, in draw order.
/// Deterministic for a fixed seed and independent of record order.
std::vector<std::string> random_baseline(std::span<const InstructionRecord> records,
                                         std::size_t k, std::uint64_t seed);

/// Same draw over a bare id list.
std::vector<std::string> random_sample(std::vector<std::string> ids, std::size_t k,
                                       std::uint64_t seed);

/// k ids ranked by instruction length in whitespace-delimited tokens
/// (top = longest first), ties by id.
std::vector<std::string> length_baseline(std::span<const InstructionRecord> records,
                                         std::size_t k, Direction direction);

/// One JSON object per pair, in order:
/// {"instruction": str, "output": str, "meta": {...}}. meta records the
/// selection provenance (instruction_id, response_model, metric,
/// metric_value, cluster_id when clustered, strategy, seed). The file is
/// written atomically and ends with a newline. Returns the pair count.
std::size_t emit_sft(std::span<const SelectedPair> pairs, const std::string& metric,
                     std::uint64_t seed, const std::string& path);

std::string sft_to_jsonl(std::span<const SelectedPair> pairs, const std::string& metric,
                         std::uint64_t seed);

}  // namespace msift
