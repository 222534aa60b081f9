#include "msift/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msift/util.hpp"

namespace msift {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

std::vector<std::vector<double>> normalized_points(std::span<const EmbeddedPoint> points) {
  const std::size_t dim = points.front().vec.size();
  std::vector<std::vector<double>> out;
  out.reserve(points.size());
  for (const EmbeddedPoint& p : points) {
    if (p.vec.empty()) {
      throw ValidationError("kmeans: point '" + p.id + "' has an empty vector");
    }
    if (p.vec.size() != dim) {
      throw ValidationError("kmeans: point '" + p.id + "' has dimension " +
                            std::to_string(p.vec.size()) + ", expected " + std::to_string(dim));
    }
    double norm2 = 0.0;
    for (double v : p.vec) norm2 += v * v;
    if (norm2 == 0.0) {
      throw ValidationError("kmeans: point '" + p.id + "' has zero norm");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<double> unit(dim);
    for (std::size_t i = 0; i < dim; ++i) unit[i] = p.vec[i] * inv;
    out.push_back(std::move(unit));
  }
  return out;
}

// D^2-weighted k-means++ seeding from the given PRNG.
std::vector<std::vector<double>> seed_centroids(const std::vector<std::vector<double>>& x,
                                                std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  centroids.push_back(x[uniform_index(rng, n)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = dist2(x[i], centroids.front());
  while (centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t chosen;
    if (total <= 0.0) {
      // every point coincides with a centroid; fall back to a uniform pick
      chosen = uniform_index(rng, n);
    } else {
      const double target = uniform_real01(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(x[chosen]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], dist2(x[i], centroids.back()));
    }
  }
  return centroids;
}

}  // namespace

std::vector<ClusterAssignment> kmeans(std::span<const EmbeddedPoint> points, std::size_t k,
                                      std::uint64_t seed, std::size_t max_iter, double tol,
                                      int threads) {
  if (k == 0) throw ValidationError("kmeans: k must be positive");
  if (k > points.size()) {
    throw ValidationError("kmeans: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(points.size()) + " points available");
  }
  const std::vector<std::vector<double>> x = normalized_points(points);
  const std::size_t n = x.size();
  const std::size_t dim = x.front().size();

  std::mt19937_64 rng = seeded_rng(seed, "kmeans");
  std::vector<std::vector<double>> centroids = seed_centroids(x, k, rng);
  std::vector<std::size_t> assign(n, 0);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Assignment pass; nearest centroid, ties to the lowest index.
    parallel_for(n, threads, [&](std::size_t i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = dist2(x[i], centroids[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assign[i] = best_c;
    });

    // An emptied cluster steals the point farthest from its current centroid.
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[assign[i]];
    std::vector<bool> reseeded(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      double worst = -1.0;
      std::size_t worst_i = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (reseeded[i] || counts[assign[i]] <= 1) continue;
        const double d = dist2(x[i], centroids[assign[i]]);
        if (d > worst) {
          worst = d;
          worst_i = i;
        }
      }
      --counts[assign[worst_i]];
      assign[worst_i] = c;
      counts[c] = 1;
      reseeded[worst_i] = true;
    }

    // Centroid update in fixed point order, so results do not depend on the
    // thread count.
    std::vector<std::vector<double>> next(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) next[assign[i]][d] += x[i][d];
    }
    double shift2 = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double inv = 1.0 / static_cast<double>(counts[c]);
      for (std::size_t d = 0; d < dim; ++d) next[c][d] *= inv;
      shift2 = std::max(shift2, dist2(next[c], centroids[c]));
    }
    centroids = std::move(next);
    if (std::sqrt(shift2) < tol) break;
  }

  std::vector<ClusterAssignment> result;
  result.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.push_back({points[i].id, static_cast<int>(assign[i])});
  }
  return result;
}

namespace {

struct Ranked {
  const std::string* id;
  double score;
};

// Global rank order: best score first per direction, ties by id.
bool ranked_before(const Ranked& a, const Ranked& b, Direction direction) {
  if (a.score != b.score) {
    return direction == Direction::kTop ? a.score > b.score : a.score < b.score;
  }
  return *a.id < *b.id;
}

}  // namespace

std::vector<std::string> balanced_select(std::span<const ClusterAssignment> assignments,
                                         const std::unordered_map<std::string, double>& scores,
                                         std::size_t budget, Direction direction) {
  if (budget == 0) throw ValidationError("balanced_select: budget must be positive");
  if (budget > assignments.size()) {
    throw ValidationError("balanced_select: budget " + std::to_string(budget) + " exceeds the " +
                          std::to_string(assignments.size()) + " assigned records");
  }

  int max_cluster = 0;
  for (const ClusterAssignment& a : assignments) max_cluster = std::max(max_cluster, a.cluster_id);
  const std::size_t n_clusters = static_cast<std::size_t>(max_cluster) + 1;

  std::vector<std::vector<Ranked>> clusters(n_clusters);
  for (const ClusterAssignment& a : assignments) {
    auto it = scores.find(a.instruction_id);
    if (it == scores.end()) {
      throw ValidationError("balanced_select: no score for id '" + a.instruction_id + "'");
    }
    clusters[a.cluster_id].push_back({&a.instruction_id, it->second});
  }
  auto cmp = [direction](const Ranked& a, const Ranked& b) {
    return ranked_before(a, b, direction);
  };
  for (auto& members : clusters) std::sort(members.begin(), members.end(), cmp);

  // Quota floor(budget / n_clusters) each; the remainder goes one extra slot
  // apiece to the largest clusters, ties to the smaller cluster id.
  const std::size_t base_quota = budget / n_clusters;
  const std::size_t remainder = budget % n_clusters;
  std::vector<std::size_t> order(n_clusters);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return clusters[a].size() > clusters[b].size();
  });
  std::vector<std::size_t> quota(n_clusters, base_quota);
  for (std::size_t i = 0; i < remainder; ++i) ++quota[order[i]];

  std::vector<Ranked> selected;
  std::vector<Ranked> leftover;
  selected.reserve(budget);
  for (std::size_t c = 0; c < n_clusters; ++c) {
    const std::size_t take = std::min(quota[c], clusters[c].size());
    for (std::size_t i = 0; i < clusters[c].size(); ++i) {
      (i < take ? selected : leftover).push_back(clusters[c][i]);
    }
  }

  // Under-full clusters leave a deficit; refill it from the global ranking
  // of everything not yet selected.
  if (selected.size() < budget) {
    std::sort(leftover.begin(), leftover.end(), cmp);
    const std::size_t deficit = budget - selected.size();
    selected.insert(selected.end(), leftover.begin(), leftover.begin() + deficit);
  }

  std::sort(selected.begin(), selected.end(), cmp);
  std::vector<std::string> result;
  result.reserve(budget);
  for (const Ranked& r : selected) result.push_back(*r.id);
  return result;
}

}  // namespace msift
