#pragma once

#include <span>
#include <string>
#include <vector>

#include "msift/types.hpp"

namespace msift {

/// Standardizes to zero mean and unit (population) variance.
/// A constant column maps to all zeros.
std::vector<double> zscore(std::span<const double> values);

/// Rescales to [0, 1]. A constant column maps to all 0.5.
std::vector<double> minmax(std::span<const double> values);

/// Empirical-rank map onto [0, 1]: (avg_rank - 1) / (n - 1) with ascending,
/// tie-averaged ranks, so the largest raw value lands on 1.0. A single
/// element maps to 0.5. Invariant under any strictly increasing transform of
/// the input.
std::vector<double> quantile_transform(std::span<const double> values);

/// One metric column after the three-stage pipeline
/// zscore -> minmax -> quantile_transform. Values lie in [0, 1] and are
/// order-isomorphic to the raw column.
struct NormalizedColumn {
  std::string metric_name;
  std::vector<double> values;
};

NormalizedColumn normalize_column(std::string metric_name, std::span<const double> values);

/// Fills the multi column: multi_i = w_dif * rho_dif,i + w_sep * rho_sep,i
/// + w_stab * rho_stab,i over the normalized columns. Rows without a defined
/// stability get the column midpoint rho = 0.5 and are flagged
/// stability_imputed. An empty table passes through unchanged.
ScoreTable aggregate(ScoreTable table, const Weights& weights);

}  // namespace msift
