#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "msift/types.hpp"

namespace msift {

struct EmbeddedPoint {
  std::string id;
  std::vector<double> vec;
};

/// Seeded k-means over L2-normalized vectors (Euclidean distance on the unit
/// sphere orders like cosine distance). k-means++ seeding, Lloyd iterations
/// until the largest centroid shift drops below tol or max_iter is reached.
/// An emptied cluster is re-seeded with the point farthest from its current
/// centroid. Fixed seed => identical assignments; threads only parallelize
/// the assignment pass and never change the result.
std::vector<ClusterAssignment> kmeans(std::span<const EmbeddedPoint> points, std::size_t k,
                                      std::uint64_t seed, std::size_t max_iter = 100,
                                      double tol = 1e-6, int threads = 1);

/// Draws `budget` ids, spread evenly over clusters. Quota per cluster is
/// floor(budget / n_clusters); the remainder goes one slot each to the
/// largest clusters (ties to the smaller cluster_id). Within a cluster, ids
/// rank by score per direction with lexicographic id tie-break. Clusters too
/// small for their quota have the deficit refilled from the global ranking
/// of unselected ids. Returns exactly `budget` ids in global rank order.
std::vector<std::string> balanced_select(std::span<const ClusterAssignment> assignments,
                                         const std::unordered_map<std::string, double>& scores,
                                         std::size_t budget, Direction direction);

}  // namespace msift
