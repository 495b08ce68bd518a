#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sspinv/error.hpp"
#include "sspinv/profile.hpp"

namespace sspinv {

// Cyclic day-of-year difference on a 365-day year; symmetric, in [0, 182].
inline int timeDifference(int dayA, int dayB) {
  const int a = normalizeDayOfYear(dayA);
  const int b = normalizeDayOfYear(dayB);
  const int diff = std::abs(a - b);
  if (diff < 183) return diff;
  return 365 + std::min(a, b) - std::max(a, b);
}

// Longitude recoding that makes the antimeridian continuous:
//   east (0 <= lon <= 180)  -> |lon| - 180
//   west (-180 < lon < 0)   -> 180 - |lon|
// 0 maps to -180 and 180 maps to 0 through the east branch; -180 is read as 180E.
inline double codeLongitude(double longitude) {
  if (!std::isfinite(longitude) || longitude < -180.0 || longitude > 180.0)
    throw DomainError("longitude out of range: " + std::to_string(longitude));
  if (longitude == -180.0) longitude = 180.0;
  if (longitude >= 0.0) return std::abs(longitude) - 180.0;
  return 180.0 - std::abs(longitude);
}

// Location in the coded chart. Latitude is used as-is (signed in the south).
struct CodedLocation {
  double x = 0.0;
  double y = 0.0;

  static CodedLocation fromGeo(const GeoPoint& p) { return {codeLongitude(p.longitude), p.latitude}; }
  friend bool operator==(const CodedLocation&, const CodedLocation&) = default;
};

// Where and when an inversion task (or any profile) was sampled.
struct TaskMeta {
  CodedLocation location;
  int dayOfYear = 1;

  static TaskMeta of(const SoundSpeedProfile& p) { return {CodedLocation::fromGeo(p.location()), p.dayOfYear()}; }
};

inline double spatialDistance(const CodedLocation& a, const CodedLocation& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// phi = lambda * dt_days + (1 - lambda) * |coded position difference|.
inline double spatioTemporalDistance(const TaskMeta& task, const TaskMeta& ref, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  const double dt = timeDifference(task.dayOfYear, ref.dayOfYear);
  const double dx = spatialDistance(task.location, ref.location);
  return lambda * dt + (1.0 - lambda) * dx;
}

inline double spatioTemporalDistance(const TaskMeta& task, const SoundSpeedProfile& ref, double lambda) {
  return spatioTemporalDistance(task, TaskMeta::of(ref), lambda);
}

struct ProfileCluster {
  int id = 0;
  std::vector<std::string> members;
  std::vector<double> centroid;
};

struct TaskSelectionConfig {
  std::size_t psi = 5;
  double lambdaTk = 0.02;

  void validate() const {
    if (psi < 1) throw ConfigError("psi must be >= 1");
    if (!(lambdaTk >= 0.0 && lambdaTk <= 1.0)) throw ConfigError("lambdaTk must lie in [0, 1]");
  }
};

// Cluster owning the plurality of the psi profiles nearest to the task.
// Ties go to the cluster whose member ranks nearest. Profiles that belong to
// no cluster still occupy a rank but cast no vote.
inline int selectTaskCluster(const TaskMeta& task, std::span<const ProfileCluster> clusters,
                             std::span<const SoundSpeedProfile> profiles, const TaskSelectionConfig& cfg) {
  cfg.validate();
  if (clusters.empty()) throw ConfigError("no clusters to select from");
  if (cfg.psi > profiles.size()) throw ConfigError("psi exceeds the number of profiles");

  std::unordered_map<std::string, int> owner;
  for (const auto& c : clusters)
    for (const auto& m : c.members) owner.emplace(m, c.id);

  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i)
    ranked.emplace_back(spatioTemporalDistance(task, profiles[i], cfg.lambdaTk), i);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<int, std::pair<int, std::size_t>> votes;  // cluster -> (count, best rank)
  for (std::size_t r = 0; r < cfg.psi; ++r) {
    auto it = owner.find(profiles[ranked[r].second].id());
    if (it == owner.end()) continue;
    auto [pos, inserted] = votes.try_emplace(it->second, 0, r);
    ++pos->second.first;
  }
  if (votes.empty()) return clusters.front().id;

  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    const auto [count, rank] = it->second;
    if (count > best->second.first || (count == best->second.first && rank < best->second.second)) best = it;
  }
  return best->first;
}

}  // namespace sspinv
