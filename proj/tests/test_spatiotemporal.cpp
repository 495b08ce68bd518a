#include <gtest/gtest.h>

#include <random>

#include "sspinv/spatiotemporal.hpp"

using namespace sspinv;

TEST(TimeDifference, Branches) {
  EXPECT_EQ(timeDifference(100, 110), 10);
  EXPECT_EQ(timeDifference(1, 365), 1);
  EXPECT_EQ(timeDifference(10, 193), 182);
  EXPECT_EQ(timeDifference(10, 192), 182);
  EXPECT_EQ(timeDifference(5, 5), 0);
  EXPECT_EQ(timeDifference(366, 1), 1);
}

TEST(TimeDifference, AllPairsSymmetricAndBounded) {
  for (int a = 1; a <= 365; ++a)
    for (int b = 1; b <= 365; ++b) {
      const int d = timeDifference(a, b);
      ASSERT_EQ(d, timeDifference(b, a));
      ASSERT_GE(d, 0);
      ASSERT_LE(d, 183);
      // brute force: shortest way around a 365-day circle
      const int direct = std::abs(a - b);
      ASSERT_EQ(d, std::min(direct, 365 - direct));
    }
}

TEST(CodeLongitude, Branches) {
  EXPECT_DOUBLE_EQ(codeLongitude(90.0), -90.0);
  EXPECT_DOUBLE_EQ(codeLongitude(-90.0), 90.0);
  EXPECT_DOUBLE_EQ(codeLongitude(179.0), -1.0);
  EXPECT_DOUBLE_EQ(codeLongitude(-179.0), 1.0);
  EXPECT_DOUBLE_EQ(codeLongitude(0.0), -180.0);
  EXPECT_DOUBLE_EQ(codeLongitude(180.0), 0.0);
  EXPECT_DOUBLE_EQ(codeLongitude(-180.0), 0.0);
  EXPECT_THROW(codeLongitude(181.0), DomainError);
  EXPECT_THROW(codeLongitude(NAN), DomainError);
}

TEST(CodeLongitude, AntimeridianNeighboursAreClose) {
  const auto a = CodedLocation::fromGeo({179.5, 10.0});
  const auto b = CodedLocation::fromGeo({-179.5, 10.0});
  EXPECT_NEAR(spatialDistance(a, b), 1.0, 1e-12);
}

TEST(SpatioTemporalDistance, Cases) {
  const TaskMeta t{CodedLocation::fromGeo({120.0, 20.0}), 100};
  EXPECT_DOUBLE_EQ(spatioTemporalDistance(t, t, 0.3), 0.0);
  const TaskMeta far{CodedLocation::fromGeo({-40.0, -20.0}), 110};
  EXPECT_DOUBLE_EQ(spatioTemporalDistance(t, far, 1.0), 10.0);
  // phi_alpha = 50 days, phi_beta = 2 coded degrees
  const TaskMeta a{{0.0, 0.0}, 1};
  const TaskMeta b{{2.0, 0.0}, 51};
  EXPECT_NEAR(spatioTemporalDistance(a, b, 0.02), 2.96, 1e-12);
  EXPECT_THROW(spatioTemporalDistance(a, b, 1.5), ConfigError);
}

namespace {

SoundSpeedProfile at(double lon, double lat, int day, std::string id) {
  return SoundSpeedProfile({0.0, 1.0}, {1500.0, 1500.0}, {lon, lat}, day, std::move(id));
}

}  // namespace

TEST(SelectTaskCluster, SingleClusterAndPsiOne) {
  std::vector<SoundSpeedProfile> ps{at(10, 10, 50, "a"), at(20, 10, 50, "b"), at(30, 10, 50, "c")};
  std::vector<ProfileCluster> one{{7, {"a", "b", "c"}, {}}};
  const TaskMeta task{CodedLocation::fromGeo({29.0, 10.0}), 50};
  EXPECT_EQ(selectTaskCluster(task, one, ps, {1, 0.02}), 7);
  std::vector<ProfileCluster> two{{0, {"a", "b"}, {}}, {1, {"c"}, {}}};
  EXPECT_EQ(selectTaskCluster(task, two, ps, {1, 0.02}), 1);
  EXPECT_EQ(selectTaskCluster(task, two, ps, {3, 0.02}), 0);
  EXPECT_THROW(selectTaskCluster(task, two, ps, {4, 0.02}), ConfigError);
  EXPECT_THROW(selectTaskCluster(task, {}, ps, {1, 0.02}), ConfigError);
}

// Two clusters in separate regions; a task dropped inside region A must
// select A, checked against a brute-force ranking.
TEST(SelectTaskCluster, TaskInsideRegionSelectsThatRegion) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::vector<SoundSpeedProfile> ps;
  std::vector<ProfileCluster> clusters{{0, {}, {}}, {1, {}, {}}};
  for (int i = 0; i < 20; ++i) {
    ps.push_back(at(110 + jitter(rng), 15 + jitter(rng), 100 + static_cast<int>(10 * jitter(rng)), "A" + std::to_string(i)));
    clusters[0].members.push_back(ps.back().id());
    ps.push_back(at(150 + jitter(rng), -5 + jitter(rng), 250 + static_cast<int>(10 * jitter(rng)), "B" + std::to_string(i)));
    clusters[1].members.push_back(ps.back().id());
  }
  for (int trial = 0; trial < 20; ++trial) {
    const TaskMeta task{CodedLocation::fromGeo({110 + jitter(rng), 15 + jitter(rng)}), 100 + static_cast<int>(5 * jitter(rng))};
    std::vector<std::pair<double, char>> ranked;
    for (const auto& p : ps) ranked.emplace_back(spatioTemporalDistance(task, p, 0.02), p.id()[0]);
    std::sort(ranked.begin(), ranked.end());
    int votesA = 0;
    for (int r = 0; r < 5; ++r) votesA += ranked[r].second == 'A';
    ASSERT_GE(votesA, 3);
    EXPECT_EQ(selectTaskCluster(task, clusters, ps, {5, 0.02}), 0);
  }
}
