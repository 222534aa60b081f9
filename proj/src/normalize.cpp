#include "msift/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msift/metrics.hpp"

namespace msift {

std::vector<double> zscore(std::span<const double> values) {
  if (values.empty()) throw ValidationError("zscore: empty input");
  const std::size_t n = values.size();
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / static_cast<double>(n));
  std::vector<double> out(n, 0.0);
  if (sigma == 0.0) return out;  // constant column
  for (std::size_t i = 0; i < n; ++i) out[i] = (values[i] - mean) / sigma;
  return out;
}

std::vector<double> minmax(std::span<const double> values) {
  if (values.empty()) throw ValidationError("minmax: empty input");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) return std::vector<double>(values.size(), 0.5);
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - lo) / (hi - lo));
  return out;
}

std::vector<double> quantile_transform(std::span<const double> values) {
  if (values.empty()) throw ValidationError("quantile_transform: empty input");
  const std::size_t n = values.size();
  if (n == 1) return {0.5};
  // Ascending tie-averaged ranks: rank 1 = smallest, so the largest raw
  // value maps to 1.0.
  const RankVector ranks = rank_vector(values, /*higher_is_better=*/false);
  std::vector<double> out;
  out.reserve(n);
  for (double r : ranks.ranks) out.push_back((r - 1.0) / static_cast<double>(n - 1));
  return out;
}

NormalizedColumn normalize_column(std::string metric_name, std::span<const double> values) {
  const std::vector<double> standardized = zscore(values);
  const std::vector<double> scaled = minmax(standardized);
  return NormalizedColumn{std::move(metric_name), quantile_transform(scaled)};
}

ScoreTable aggregate(ScoreTable table, const Weights& weights) {
  if (table.empty()) return table;
  const std::size_t n = table.size();

  std::vector<double> difficulty_col, separability_col;
  difficulty_col.reserve(n);
  separability_col.reserve(n);
  std::vector<double> stability_defined;
  std::vector<std::size_t> stability_rows;  // row index per defined entry
  for (std::size_t i = 0; i < n; ++i) {
    const ScoreRow& row = table.rows[i];
    difficulty_col.push_back(row.difficulty);
    separability_col.push_back(row.separability);
    if (row.stability) {
      stability_defined.push_back(*row.stability);
      stability_rows.push_back(i);
    }
  }

  const NormalizedColumn rho_dif = normalize_column("difficulty", difficulty_col);
  const NormalizedColumn rho_sep = normalize_column("separability", separability_col);

  // Rows without a defined stability take the column midpoint 0.5 and are
  // flagged, so they stay in the candidate pool without distorting the rest.
  std::vector<double> rho_stab(n, 0.5);
  std::vector<bool> imputed(n, true);
  if (!stability_defined.empty()) {
    const NormalizedColumn normalized = normalize_column("stability", stability_defined);
    for (std::size_t j = 0; j < stability_rows.size(); ++j) {
      rho_stab[stability_rows[j]] = normalized.values[j];
      imputed[stability_rows[j]] = false;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    ScoreRow& row = table.rows[i];
    row.multi = weights.difficulty * rho_dif.values[i] + weights.separability * rho_sep.values[i] +
                weights.stability * rho_stab[i];
    row.stability_imputed = imputed[i];
  }
  return table;
}

}  // namespace msift
