#pragma once

#include <optional>
#include <span>
#include <string>

#include "msift/types.hpp"

namespace msift {

/// Ranks with 1 = best; tied items receive the average of the ranks they
/// span, so the rank sum is always n(n+1)/2.
struct RankVector {
  std::vector<double> ranks;

  std::size_t size() const { return ranks.size(); }
};

/// Negative mean of the response scores. Higher = harder instruction.
double difficulty(std::span<const double> scores);

/// Variance of the response scores across models. Population divisor N by
/// default; sample_variance switches to N-1 (returns 0 for a single score).
double separability(std::span<const double> scores, bool sample_variance = false);

RankVector rank_vector(std::span<const double> values, bool higher_is_better);

/// Rank correlation of two equal-length rank vectors (Pearson on ranks).
/// Empty result when either vector is fully tied: the correlation has no
/// defined value there.
std::optional<double> spearman(const RankVector& ra, const RankVector& rb);

/// Mean per-family rank correlation between model size and reward score,
/// over families contributing >= 2 responses to the record. An all-tied
/// family counts as 0 rather than being dropped, so the denominator is the
/// same for every record with the same family coverage. Empty when no family
/// contributes >= 2 responses.
std::optional<double> try_stability(const InstructionRecord& record, const ModelCatalog& catalog,
                                    const std::string& reward_model);

/// Like try_stability, but throws ValidationError when no rankable family
/// is present.
double stability(const InstructionRecord& record, const ModelCatalog& catalog,
                 const std::string& reward_model);

/// One ScoreRow per record, in record order; multi left empty. Scoring is a
/// pure per-record function, so threads > 1 only changes wall time.
ScoreTable score_dataset(std::span<const InstructionRecord> records, const ModelCatalog& catalog,
                         const std::string& reward_model, int threads = 1,
                         bool sample_variance = false);

/// Reward scores of one record under the given key, in response order.
/// Throws ValidationError naming the record and response on a missing key.
std::vector<double> reward_scores(const InstructionRecord& record, const std::string& reward_model);

}  // namespace msift
