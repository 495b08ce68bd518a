#include <gtest/gtest.h>

#include <random>
#include <set>

#include "sspinv/clustering.hpp"

using namespace sspinv;

namespace {

std::vector<SoundSpeedProfile> twoFamilies(std::mt19937_64& rng, int perFamily) {
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<SoundSpeedProfile> out;
  for (int f = 0; f < 2; ++f)
    for (int i = 0; i < perFamily; ++i) {
      std::vector<double> d, s;
      for (int z = 0; z <= 1000; z += 100) {
        d.push_back(z);
        s.push_back(1500.0 + (f == 0 ? -20.0 : 20.0) + 0.01 * z + noise(rng));
      }
      out.emplace_back(d, s, GeoPoint{}, 1, (f == 0 ? "lo" : "hi") + std::to_string(i));
    }
  return out;
}

}  // namespace

TEST(Clustering, RecoversSeparatedFamilies) {
  std::mt19937_64 rng(5);
  const auto ps = twoFamilies(rng, 15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clusters = clusterProfiles(ps, 2, seed);
    ASSERT_EQ(clusters.size(), 2u);
    for (const auto& c : clusters) {
      ASSERT_EQ(c.members.size(), 15u);
      const auto prefix = c.members.front().substr(0, 2);
      for (const auto& m : c.members) EXPECT_EQ(m.substr(0, 2), prefix);
    }
  }
}

TEST(Clustering, SingleClusterCentroidIsTheMean) {
  std::mt19937_64 rng(6);
  const auto ps = twoFamilies(rng, 4);
  const auto clusters = clusterProfiles(ps, 1, 1, {10, 100});
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].members.size(), ps.size());
  for (std::size_t d = 0; d < 10; ++d) {
    double mean = 0.0;
    for (const auto& p : ps) mean += downsampleToLayers(p, 10)[d];
    mean /= static_cast<double>(ps.size());
    EXPECT_NEAR(clusters[0].centroid[d], mean, 1e-9);
  }
}

TEST(Clustering, KEqualsCountGivesSingletons) {
  std::mt19937_64 rng(7);
  const auto ps = twoFamilies(rng, 3);
  const auto clusters = clusterProfiles(ps, static_cast<int>(ps.size()), 2);
  std::set<std::string> seen;
  for (const auto& c : clusters) {
    ASSERT_EQ(c.members.size(), 1u);
    seen.insert(c.members[0]);
  }
  EXPECT_EQ(seen.size(), ps.size());
}

TEST(Clustering, DeterministicAndValidated) {
  std::mt19937_64 rng(8);
  const auto ps = twoFamilies(rng, 6);
  const auto a = clusterProfiles(ps, 3, 42);
  const auto b = clusterProfiles(ps, 3, 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].members, b[i].members);
  EXPECT_THROW(clusterProfiles(ps, 0, 1), ConfigError);
  EXPECT_THROW(clusterProfiles(ps, 13, 1), ConfigError);
}
