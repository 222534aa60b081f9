#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "msift/cluster.hpp"
#include "msift/select.hpp"
#include "msift/util.hpp"
#include "test_support.hpp"

using namespace msift;

namespace {

// Three tight blobs around orthogonal axes; trivially separable after
// L2 normalization.
std::vector<EmbeddedPoint> planted_blobs(std::size_t per_cluster, std::uint64_t seed) {
  std::vector<EmbeddedPoint> points;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.01);
  const std::vector<std::vector<double>> centers = {
      {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t i = 0; i < per_cluster; ++i) {
      EmbeddedPoint p;
      p.id = "p" + std::to_string(c) + "-" + std::to_string(i);
      p.vec = centers[c];
      for (double& v : p.vec) v += noise(rng);
      points.push_back(std::move(p));
    }
  }
  return points;
}

std::map<std::string, int> as_map(const std::vector<ClusterAssignment>& assignments) {
  std::map<std::string, int> m;
  for (const auto& a : assignments) m[a.instruction_id] = a.cluster_id;
  return m;
}

}  // namespace

TEST_CASE("kmeans validates its inputs") {
  std::vector<EmbeddedPoint> points = {{"a", {1, 0}}, {"b", {0, 1}}};
  CHECK_THROWS_AS(kmeans(points, 0, 0), ValidationError);
  CHECK_THROWS_AS(kmeans(points, 3, 0), ValidationError);
  const std::vector<EmbeddedPoint> empty_vec = {{"a", {}}};
  CHECK_THROWS_AS(kmeans(empty_vec, 1, 0), ValidationError);
  const std::vector<EmbeddedPoint> mixed = {{"a", {1, 0}}, {"b", {1, 0, 0}}};
  CHECK_THROWS_AS(kmeans(mixed, 1, 0), ValidationError);
  const std::vector<EmbeddedPoint> zero = {{"a", {0, 0}}, {"b", {1, 0}}};
  CHECK_THROWS_WITH_AS(kmeans(zero, 1, 0), doctest::Contains("zero norm"), ValidationError);
}

TEST_CASE("k = 1 assigns everything to cluster 0") {
  const auto points = planted_blobs(4, 1);
  const auto assignments = kmeans(points, 1, 0);
  REQUIRE(assignments.size() == points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(assignments[i].instruction_id == points[i].id);
    CHECK(assignments[i].cluster_id == 0);
  }
}

TEST_CASE("kmeans recovers planted blobs exactly") {
  const auto points = planted_blobs(20, 7);
  const auto assignments = kmeans(points, 3, 42);
  const auto by_id = as_map(assignments);
  // Every blob maps onto one label and the labels are distinct.
  std::set<int> labels;
  for (int blob = 0; blob < 3; ++blob) {
    const int label = by_id.at("p" + std::to_string(blob) + "-0");
    labels.insert(label);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(by_id.at("p" + std::to_string(blob) + "-" + std::to_string(i)) == label);
    }
  }
  CHECK(labels.size() == 3);
}

TEST_CASE("kmeans output is identical across seeds-fixed reruns and thread counts") {
  const auto points = planted_blobs(15, 3);
  const auto base = kmeans(points, 3, 5, 100, 1e-6, 1);
  CHECK(as_map(kmeans(points, 3, 5, 100, 1e-6, 1)) == as_map(base));
  CHECK(as_map(kmeans(points, 3, 5, 100, 1e-6, 4)) == as_map(base));
  CHECK(as_map(kmeans(points, 3, 5, 100, 1e-6, 7)) == as_map(base));
}

TEST_CASE("kmeans ignores vector magnitude") {
  auto points = planted_blobs(10, 9);
  const auto base = as_map(kmeans(points, 3, 1));
  for (auto& p : points) {
    for (double& v : p.vec) v *= 37.5;
  }
  CHECK(as_map(kmeans(points, 3, 1)) == base);
}

TEST_CASE("kmeans covers all k clusters on separable data") {
  const auto points = planted_blobs(8, 11);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto assignments = kmeans(points, 3, seed);
    std::set<int> labels;
    for (const auto& a : assignments) {
      CHECK(a.cluster_id >= 0);
      CHECK(a.cluster_id < 3);
      labels.insert(a.cluster_id);
    }
    CHECK(labels.size() == 3);
  }
}

TEST_CASE("balanced_select spreads a budget over clusters") {
  // Cluster 0 holds 3 ids, cluster 1 holds 1; budget 4 takes everything.
  const std::vector<ClusterAssignment> assignments = {
      {"a", 0}, {"b", 0}, {"c", 0}, {"d", 1}};
  const std::unordered_map<std::string, double> scores = {
      {"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}};
  const auto all = balanced_select(assignments, scores, 4, Direction::kTop);
  CHECK(all == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("remainder slots go to the largest clusters, ties to smaller id") {
  // Sizes: cluster 0 -> 4, cluster 1 -> 3, cluster 2 -> 3. Budget 5:
  // base quota 1 each, remainder 2 -> clusters 0 and 1.
  std::vector<ClusterAssignment> assignments;
  std::unordered_map<std::string, double> scores;
  const std::vector<int> sizes = {4, 3, 3};
  double score = 100;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < sizes[c]; ++i) {
      const std::string id = "c" + std::to_string(c) + "-" + std::to_string(i);
      assignments.push_back({id, c});
      scores[id] = score--;  // ids earlier in the build rank higher
    }
  }
  const auto picked = balanced_select(assignments, scores, 5, Direction::kTop);
  REQUIRE(picked.size() == 5);
  std::map<int, int> per_cluster;
  for (const auto& id : picked) per_cluster[id[1] - '0']++;
  CHECK(per_cluster[0] == 2);
  CHECK(per_cluster[1] == 2);
  CHECK(per_cluster[2] == 1);
  // Within each cluster the top-scored ids were taken.
  CHECK(std::count(picked.begin(), picked.end(), "c0-0") == 1);
  CHECK(std::count(picked.begin(), picked.end(), "c0-1") == 1);
  CHECK(std::count(picked.begin(), picked.end(), "c1-0") == 1);
  CHECK(std::count(picked.begin(), picked.end(), "c1-1") == 1);
  CHECK(std::count(picked.begin(), picked.end(), "c2-0") == 1);
}

TEST_CASE("deficits refill from the global ranking") {
  // Cluster 1 has a single id but a quota of 2; the shortfall goes to the
  // globally best unselected id.
  const std::vector<ClusterAssignment> assignments = {
      {"a", 0}, {"b", 0}, {"c", 0}, {"d", 0}, {"lone", 1}};
  const std::unordered_map<std::string, double> scores = {
      {"a", 10}, {"b", 9}, {"c", 8}, {"d", 1}, {"lone", 5}};
  const auto picked = balanced_select(assignments, scores, 4, Direction::kTop);
  CHECK(picked == std::vector<std::string>{"a", "b", "c", "lone"});
}

TEST_CASE("one cluster reduces balanced_select to top_k") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> dist(0, 20);
  std::vector<ClusterAssignment> assignments;
  std::unordered_map<std::string, double> scores;
  for (int i = 0; i < 50; ++i) {
    const std::string id = "id-" + std::to_string(i);
    assignments.push_back({id, 0});
    scores[id] = dist(rng);
  }
  for (auto direction : {Direction::kTop, Direction::kBottom}) {
    for (std::size_t budget : {1ul, 7ul, 50ul}) {
      CHECK(balanced_select(assignments, scores, budget, direction) ==
            top_k(scores, budget, direction));
    }
  }
}

TEST_CASE("balanced_select returns exactly budget unique known ids in rank order") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> cluster_dist(0, 4);
  std::uniform_real_distribution<double> score_dist(0, 1);
  std::vector<ClusterAssignment> assignments;
  std::unordered_map<std::string, double> scores;
  for (int i = 0; i < 60; ++i) {
    const std::string id = "id-" + std::to_string(i);
    assignments.push_back({id, cluster_dist(rng)});
    scores[id] = score_dist(rng);
  }
  for (std::size_t budget : {1ul, 12ul, 37ul, 60ul}) {
    const auto picked = balanced_select(assignments, scores, budget, Direction::kTop);
    REQUIRE(picked.size() == budget);
    CHECK(std::set<std::string>(picked.begin(), picked.end()).size() == budget);
    for (std::size_t i = 1; i < picked.size(); ++i) {
      const double prev = scores.at(picked[i - 1]);
      const double cur = scores.at(picked[i]);
      CHECK((prev > cur || (prev == cur && picked[i - 1] < picked[i])));
    }
  }
}

TEST_CASE("balanced_select validates budget and score coverage") {
  const std::vector<ClusterAssignment> assignments = {{"a", 0}, {"b", 1}};
  const std::unordered_map<std::string, double> scores = {{"a", 1}, {"b", 2}};
  CHECK_THROWS_AS(balanced_select(assignments, scores, 0, Direction::kTop), ValidationError);
  CHECK_THROWS_AS(balanced_select(assignments, scores, 3, Direction::kTop), ValidationError);
  const std::unordered_map<std::string, double> partial = {{"a", 1}};
  CHECK_THROWS_WITH_AS(balanced_select(assignments, partial, 1, Direction::kTop),
                       doctest::Contains("no score for id 'b'"), ValidationError);
}
