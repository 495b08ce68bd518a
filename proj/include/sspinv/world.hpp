#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sspinv/error.hpp"
#include "sspinv/profile.hpp"
#include "sspinv/ray.hpp"

namespace sspinv {

// Canonical Munk profile c(z) = c_axis * (1 + eps * (eta - 1 + exp(-eta))), eta = 2 (z - z_axis) / B.
struct MunkParameters {
  double axisSpeed = 1500.0;
  double axisDepth = 1300.0;
  double scaleDepth = 1300.0;
  double epsilon = 0.00737;

  double speedAt(double z) const {
    const double eta = 2.0 * (z - axisDepth) / scaleDepth;
    return axisSpeed * (1.0 + epsilon * (eta - 1.0 + std::exp(-eta)));
  }
};

struct SyntheticWorldConfig {
  std::size_t clusterCount = 10;
  std::size_t profilesPerCluster = 30;
  double maxDepth = 3500.0;
  double sampleSpacing = 1.0;
  std::uint64_t seed = 2023;

  // family parameter ranges, drawn once per cluster
  double axisSpeedMin = 1488.0, axisSpeedMax = 1502.0;
  double axisDepthMin = 900.0, axisDepthMax = 1400.0;
  double scaleDepthMin = 1000.0, scaleDepthMax = 1500.0;
  double epsilonMin = 0.0060, epsilonMax = 0.0080;
  // member jitter around the cluster family
  double axisSpeedJitter = 0.6;
  double axisDepthJitter = 25.0;

  // two sinusoidal perturbation modes sin(k pi z / maxDepth) * exp(-z / modeDecayDepth)
  double modeDecayDepth = 1000.0;
  double seasonalAmplitude[2] = {6.0, 3.0};  // m/s at the seasonal peak
  double spatialGradient[2] = {1.0, 0.5};    // m/s per degree of offset from the cluster centre
  double modeNoise[2] = {0.4, 0.3};          // m/s, independent per profile

  // geography and season
  double regionSpreadDegrees = 1.0;     // members scatter +- this around the cluster centre
  double seasonalHalfWindowDays = 45.0; // members scatter +- this around the cluster's central day

  std::size_t taskCluster = 0;

  void validate() const {
    if (clusterCount < 1 || profilesPerCluster < 1) throw ConfigError("world counts must be >= 1");
    if (!(maxDepth > 0.0) || !(sampleSpacing > 0.0)) throw ConfigError("world depths must be positive");
    if (taskCluster >= clusterCount) throw ConfigError("task cluster index out of range");
  }
};

struct ClusterRegion {
  GeoPoint centre;
  int centralDay = 1;
  MunkParameters family;
  double seasonalPhaseDay = 0.0;
  double gradientAzimuth[2] = {0.0, 0.0};
};

struct SyntheticWorld {
  std::vector<SoundSpeedProfile> profiles;       // historical set, task excluded
  std::vector<std::size_t> generatingCluster;    // family index per profile
  std::vector<ClusterRegion> regions;
  SoundSpeedProfile task;
};

namespace detail {

inline int wrapDay(double day) {
  int d = static_cast<int>(std::lround(day));
  while (d < 1) d += 365;
  while (d > 365) d -= 365;
  return d;
}

inline double wrapLongitude(double lon) {
  while (lon <= -180.0) lon += 360.0;
  while (lon > 180.0) lon -= 360.0;
  return lon;
}

inline SoundSpeedProfile synthesizeProfile(const SyntheticWorldConfig& cfg, const ClusterRegion& region,
                                           const GeoPoint& where, int day, std::mt19937_64& rng, std::string id) {
  std::normal_distribution<double> unit(0.0, 1.0);
  MunkParameters munk = region.family;
  munk.axisSpeed += cfg.axisSpeedJitter * unit(rng);
  munk.axisDepth += cfg.axisDepthJitter * unit(rng);

  const double dLon = where.longitude - region.centre.longitude;
  const double dLat = where.latitude - region.centre.latitude;
  const double season = std::cos(2.0 * std::numbers::pi * (day - region.seasonalPhaseDay) / 365.0);
  double amp[2];
  for (int k = 0; k < 2; ++k) {
    const double along = dLon * std::cos(region.gradientAzimuth[k]) + dLat * std::sin(region.gradientAzimuth[k]);
    amp[k] = cfg.seasonalAmplitude[k] * season + cfg.spatialGradient[k] * along + cfg.modeNoise[k] * unit(rng);
  }

  std::vector<double> depths, speeds;
  const auto steps = static_cast<std::size_t>(std::floor(cfg.maxDepth / cfg.sampleSpacing + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) depths.push_back(cfg.sampleSpacing * static_cast<double>(i));
  if (cfg.maxDepth - depths.back() > 1e-9) depths.push_back(cfg.maxDepth);
  speeds.reserve(depths.size());
  for (double z : depths) {
    double s = munk.speedAt(z);
    const double envelope = std::exp(-z / cfg.modeDecayDepth);
    for (int k = 0; k < 2; ++k) s += amp[k] * std::sin((k + 1) * std::numbers::pi * z / cfg.maxDepth) * envelope;
    speeds.push_back(s);
  }
  return SoundSpeedProfile(std::move(depths), std::move(speeds), where, day, std::move(id));
}

}  // namespace detail

// Profile families built from Munk-type base curves with seasonal and spatial
// perturbations. Each family lives in its own region and seasonal window; the
// task profile is drawn from `taskCluster`'s region and kept out of the
// historical set.
inline SyntheticWorld generateWorld(const SyntheticWorldConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

  SyntheticWorld world{{}, {}, {}, SoundSpeedProfile({0.0, 1.0}, {1500.0, 1500.0})};
  for (std::size_t c = 0; c < cfg.clusterCount; ++c) {
    ClusterRegion r;
    r.centre = {detail::wrapLongitude(between(-180.0, 180.0)), between(-50.0, 50.0)};
    r.centralDay = detail::wrapDay(between(1.0, 365.0));
    r.family = {between(cfg.axisSpeedMin, cfg.axisSpeedMax), between(cfg.axisDepthMin, cfg.axisDepthMax),
                between(cfg.scaleDepthMin, cfg.scaleDepthMax), between(cfg.epsilonMin, cfg.epsilonMax)};
    // place the seasonal window on the flank of the annual cycle
    r.seasonalPhaseDay = r.centralDay + (u01(rng) < 0.5 ? -91.25 : 91.25);
    r.gradientAzimuth[0] = between(0.0, 2.0 * std::numbers::pi);
    r.gradientAzimuth[1] = between(0.0, 2.0 * std::numbers::pi);
    world.regions.push_back(r);
  }

  auto drawPlace = [&](const ClusterRegion& r, double spreadScale) {
    const double lon = detail::wrapLongitude(r.centre.longitude + spreadScale * between(-cfg.regionSpreadDegrees, cfg.regionSpreadDegrees));
    const double lat = r.centre.latitude + spreadScale * between(-cfg.regionSpreadDegrees, cfg.regionSpreadDegrees);
    const int day = detail::wrapDay(r.centralDay + spreadScale * between(-cfg.seasonalHalfWindowDays, cfg.seasonalHalfWindowDays));
    return std::pair{GeoPoint{lon, lat}, day};
  };

  for (std::size_t c = 0; c < cfg.clusterCount; ++c) {
    for (std::size_t i = 0; i < cfg.profilesPerCluster; ++i) {
      auto [where, day] = drawPlace(world.regions[c], 1.0);
      std::string id = "c" + std::to_string(c) + "_p" + std::to_string(i);
      world.profiles.push_back(detail::synthesizeProfile(cfg, world.regions[c], where, day, rng, std::move(id)));
      world.generatingCluster.push_back(c);
    }
  }

  auto [where, day] = drawPlace(world.regions[cfg.taskCluster], 0.5);
  world.task = detail::synthesizeProfile(cfg, world.regions[cfg.taskCluster], where, day, rng, "task");
  return world;
}

// Acoustic geometry: anchors on a diamond at the sea floor, source pings on a
// circle near the surface.
struct ScenarioConfig {
  std::size_t receiverCount = 4;
  double anchorRadius = 3000.0;
  double receiverDepth = 3500.0;
  std::size_t pingCount = 30;
  double pingRadius = 2000.0;
  double sourceDepth = 0.0;
  double noiseSigma = 1e-4;  // s
  std::size_t simulationLayers = 50;

  std::size_t inputCount() const { return receiverCount * pingCount; }
};

inline std::vector<Position> anchorPositions(const ScenarioConfig& cfg) {
  std::vector<Position> out;
  for (std::size_t m = 0; m < cfg.receiverCount; ++m) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(cfg.receiverCount);
    out.push_back({cfg.anchorRadius * std::cos(a), cfg.anchorRadius * std::sin(a), cfg.receiverDepth});
  }
  return out;
}

inline std::vector<Position> pingPositions(const ScenarioConfig& cfg) {
  std::vector<Position> out;
  for (std::size_t k = 0; k < cfg.pingCount; ++k) {
    const double a = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(cfg.pingCount);
    out.push_back({cfg.pingRadius * std::cos(a), cfg.pingRadius * std::sin(a), cfg.sourceDepth});
  }
  return out;
}

// Medium built from the profile's layer representation.
inline AcousticScenario makeScenario(const ScenarioConfig& cfg, const SoundSpeedProfile& profile) {
  auto layered = toLayerProfile(profile, cfg.simulationLayers);
  return AcousticScenario{{0.0, 0.0, cfg.sourceDepth}, anchorPositions(cfg), LayeredMedium::fromProfile(layered)};
}

inline AcousticScenario makeScenario(const ScenarioConfig& cfg, std::span<const double> layerSpeeds, double maxDepth) {
  return AcousticScenario{{0.0, 0.0, cfg.sourceDepth},
                          anchorPositions(cfg),
                          LayeredMedium(layerDepths(maxDepth, layerSpeeds.size()), {layerSpeeds.begin(), layerSpeeds.end()})};
}

}  // namespace sspinv
