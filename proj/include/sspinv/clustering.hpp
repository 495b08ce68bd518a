#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "sspinv/error.hpp"
#include "sspinv/profile.hpp"
#include "sspinv/spatiotemporal.hpp"

namespace sspinv {

namespace detail {

inline double squaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace detail

struct KMeansOptions {
  std::size_t layerCount = 50;
  int maxIterations = 100;
};

// Plain k-means on layer vectors with k-means++ seeding.
inline std::vector<ProfileCluster> clusterProfiles(std::span<const SoundSpeedProfile> profiles, int k,
                                                   std::uint64_t seed, const KMeansOptions& opts = {}) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (static_cast<std::size_t>(k) > profiles.size()) throw ConfigError("k exceeds the number of profiles");

  const std::size_t n = profiles.size();
  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (const auto& p : profiles) points.push_back(downsampleToLayers(p, opts.layerCount));

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], detail::squaredDistance(points[i], centroids.back()));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick + 1 < n; ++pick) {
        if (nearest[pick] > 0.0 && target < nearest[pick]) break;
        target -= nearest[pick];
      }
      while (nearest[pick] == 0.0) pick = (pick + 1) % n;
    } else {
      pick = centroids.size() % n;
    }
    centroids.push_back(points[pick]);
  }

  std::vector<int> label(n, -1);
  for (int iter = 0; iter < opts.maxIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bestD = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = detail::squaredDistance(points[i], centroids[static_cast<std::size_t>(c)]);
        if (d < bestD) {
          bestD = d;
          best = c;
        }
      }
      if (label[i] != best) {
        label[i] = best;
        changed = true;
      }
    }

    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(opts.layerCount, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[static_cast<std::size_t>(label[i])];
      for (std::size_t d = 0; d < s.size(); ++d) s[d] += points[i][d];
      ++counts[static_cast<std::size_t>(label[i])];
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (counts[c] == 0) {
        // steal the point farthest from its own centroid
        std::size_t far = 0;
        double farD = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = detail::squaredDistance(points[i], centroids[static_cast<std::size_t>(label[i])]);
          if (d > farD && counts[static_cast<std::size_t>(label[i])] > 1) {
            farD = d;
            far = i;
          }
        }
        --counts[static_cast<std::size_t>(label[far])];
        label[far] = static_cast<int>(c);
        centroids[c] = points[far];
        counts[c] = 1;
        changed = true;
        continue;
      }
      for (double& v : sums[c]) v /= static_cast<double>(counts[c]);
      centroids[c] = std::move(sums[c]);
    }
    if (!changed) break;
  }

  // centroids of reassigned clusters may be stale after the last pass
  std::vector<ProfileCluster> clusters(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) clusters[static_cast<std::size_t>(c)].id = c;
  for (std::size_t i = 0; i < n; ++i) clusters[static_cast<std::size_t>(label[i])].members.push_back(profiles[i].id());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    std::vector<double> mean(opts.layerCount, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<std::size_t>(label[i]) != c) continue;
      for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += points[i][d];
      ++count;
    }
    for (double& v : mean) v /= static_cast<double>(count);
    clusters[c].centroid = std::move(mean);
  }
  return clusters;
}

}  // namespace sspinv
