#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"
#include "swarmdef/clustering.hpp"

using namespace swarmdef;

TEST(Clustering, ParamsFor16v16) {
  auto p = clustering::dbscan_params(16, 16, 10.0);
  // 5 cot(π/16) and its 2/15 share, computed by hand.
  EXPECT_NEAR(p.max_net_radius, 25.1367, 1e-4);
  EXPECT_NEAR(p.eps, 3.3516, 1e-4);
  EXPECT_EQ(p.min_pts, 3);
  EXPECT_THROW(clustering::dbscan_params(16, 2, 10.0), std::invalid_argument);
  EXPECT_THROW(clustering::dbscan_params(1, 16, 10.0), std::invalid_argument);
}

TEST(Clustering, SplitThresholds) {
  EXPECT_NEAR(clustering::split_threshold(10, 16, 10.0), 25.1367 * 9 / 15, 1e-3);
  EXPECT_NEAR(clustering::split_threshold(4, 16, 10.0), 25.1367 * 3 / 15, 1e-3);
  EXPECT_DOUBLE_EQ(clustering::split_threshold(1, 16, 10.0), 0.0);
}

TEST(Clustering, LineOfPoints) {
  std::vector<Vec2> pts;
  for (int i = 0; i < 5; ++i) pts.emplace_back(2.5 * i, 0);
  pts.emplace_back(100, 100);
  auto part = clustering::cluster(pts, {3.0, 3, 0, 0});
  ASSERT_EQ(part.clusters.size(), 1u);
  EXPECT_EQ(part.clusters[0], (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(part.unclustered, (std::vector<int>{5}));
  EXPECT_NEAR(part.centers[0].x(), 5.0, 1e-12);
  EXPECT_NEAR(part.radii[0], 5.0, 1e-12);
}

TEST(Clustering, PairIsNoise) {
  std::vector<Vec2> pts{Vec2(0, 0), Vec2(1, 0)};
  auto part = clustering::cluster(pts, {3.0, 3, 0, 0});
  EXPECT_TRUE(part.clusters.empty());
  EXPECT_EQ(part.unclustered.size(), 2u);
}

TEST(Clustering, BorderTakesLowestCore) {
  // Point 4 is a border point within reach of cores 3 and 5.
  std::vector<Vec2> pts{Vec2(0, 0), Vec2(0.3, 0), Vec2(0.6, 0), Vec2(1, 0), Vec2(2, 0),
                        Vec2(3, 0), Vec2(3.4, 0), Vec2(3.7, 0), Vec2(4, 0)};
  EXPECT_EQ(clustering::dbscan_labels(pts, 1.0, 4), (std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(clustering::dbscan_labels(pts, 1.0, 6), std::vector<int>(9, -1));
}

TEST(Clustering, MatchesDefinitionOracle) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    auto pts = oracle::random_points(rng);
    double eps = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    int min_pts = std::uniform_int_distribution<int>(2, 5)(rng);
    auto got = oracle::from(clustering::cluster(pts, {eps, min_pts, 0, 0}));
    ASSERT_EQ(got, oracle::dbscan(pts, eps, min_pts)) << "trial " << trial;
  }
}

TEST(Clustering, PartitionCoversEveryPointOnce) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto pts = oracle::random_points(rng);
    auto part = clustering::cluster(pts, {2.0, 3, 0, 0});
    std::vector<int> seen(pts.size(), 0);
    for (const auto& c : part.clusters) {
      EXPECT_GE(c.size(), 3u);
      EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
      for (int i : c) seen[i]++;
    }
    for (int i : part.unclustered) seen[i]++;
    for (int s : seen) ASSERT_EQ(s, 1);
  }
}

TEST(Clustering, RadiusAndCenter) {
  std::vector<Vec2> pts{Vec2(0, 0), Vec2(4, 0), Vec2(2, 3)};
  Vec2 c = clustering::center_of_mass(pts);
  EXPECT_NEAR((c - Vec2(2, 1)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(clustering::swarm_radius(pts), std::sqrt(5.0), 1e-12);
  EXPECT_THROW(clustering::swarm_radius({}), std::invalid_argument);
}

TEST(Clustering, DetectSplit) {
  SwarmPartition p;
  p.radii = {3.0, 9.0, 5.0};
  EXPECT_EQ(clustering::detect_split(p, {4.0, 8.0, 5.0}), (std::vector<int>{1}));
  EXPECT_THROW(clustering::detect_split(p, {1.0}), std::invalid_argument);
}
