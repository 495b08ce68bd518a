#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sspinv/error.hpp"

namespace sspinv {

inline constexpr double kMinSoundSpeed = 1300.0;
inline constexpr double kMaxSoundSpeed = 1700.0;

// Signed geographic position: longitude in (-180, 180], east positive.
struct GeoPoint {
  double longitude = 0.0;
  double latitude = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

// Day 366 of a leap year folds onto 365; the cyclic time metric runs on 365 days.
inline int normalizeDayOfYear(int day) {
  if (day < 1 || day > 366) throw DomainError("day of year out of range: " + std::to_string(day));
  return std::min(day, 365);
}

// A measured or synthetic sound speed profile with its sampling metadata.
// Immutable after construction; the constructor enforces the invariants.
class SoundSpeedProfile {
public:
  SoundSpeedProfile(std::vector<double> depths, std::vector<double> speeds, GeoPoint location = {},
                    int dayOfYear = 1, std::string id = {})
      : depths_(std::move(depths)),
        speeds_(std::move(speeds)),
        location_(location),
        day_(normalizeDayOfYear(dayOfYear)),
        id_(std::move(id)) {
    validate();
  }

  std::span<const double> depths() const noexcept { return depths_; }
  std::span<const double> speeds() const noexcept { return speeds_; }
  std::size_t size() const noexcept { return depths_.size(); }
  double minDepth() const noexcept { return depths_.front(); }
  double maxDepth() const noexcept { return depths_.back(); }
  const GeoPoint& location() const noexcept { return location_; }
  int dayOfYear() const noexcept { return day_; }
  const std::string& id() const noexcept { return id_; }

  // Piecewise-linear speed at `depth`; constant beyond the end samples.
  double speedAt(double depth) const {
    if (depth <= depths_.front()) return speeds_.front();
    if (depth >= depths_.back()) return speeds_.back();
    auto it = std::upper_bound(depths_.begin(), depths_.end(), depth);
    const auto hi = static_cast<std::size_t>(it - depths_.begin());
    const auto lo = hi - 1;
    const double t = (depth - depths_[lo]) / (depths_[hi] - depths_[lo]);
    return speeds_[lo] + t * (speeds_[hi] - speeds_[lo]);
  }

  // Same metadata, new samples.
  SoundSpeedProfile withSamples(std::vector<double> depths, std::vector<double> speeds) const {
    return SoundSpeedProfile(std::move(depths), std::move(speeds), location_, day_, id_);
  }

  SoundSpeedProfile withId(std::string id) const {
    return SoundSpeedProfile(depths_, speeds_, location_, day_, std::move(id));
  }

  friend bool operator==(const SoundSpeedProfile&, const SoundSpeedProfile&) = default;

private:
  void validate() const {
    if (depths_.size() != speeds_.size())
      throw InvalidProfileError("depth and speed counts differ");
    if (depths_.size() < 2) throw InvalidProfileError("fewer than 2 samples");
    if (!std::isfinite(depths_.front()) || depths_.front() < 0.0)
      throw InvalidProfileError("first depth must be finite and >= 0");
    for (std::size_t i = 0; i < depths_.size(); ++i) {
      if (!std::isfinite(depths_[i])) throw InvalidProfileError("non-finite depth");
      if (i > 0 && !(depths_[i] > depths_[i - 1]))
        throw InvalidProfileError("depths not strictly increasing at index " + std::to_string(i));
      const double s = speeds_[i];
      if (!std::isfinite(s) || s < kMinSoundSpeed || s > kMaxSoundSpeed)
        throw InvalidProfileError("speed " + std::to_string(s) + " outside [1300, 1700] m/s at depth " +
                                  std::to_string(depths_[i]));
    }
  }

  std::vector<double> depths_;
  std::vector<double> speeds_;
  GeoPoint location_;
  int day_;
  std::string id_;
};

// Evenly spaced depths from `top` to `bottom` inclusive, `count` nodes.
inline std::vector<double> evenlySpacedDepths(double top, double bottom, std::size_t count) {
  std::vector<double> grid(count);
  const double step = (bottom - top) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = top + step * static_cast<double>(i);
  grid.back() = bottom;
  return grid;
}

inline std::vector<double> interpolateAt(const SoundSpeedProfile& profile, std::span<const double> depths) {
  std::vector<double> out;
  out.reserve(depths.size());
  for (double z : depths) out.push_back(profile.speedAt(z));
  return out;
}

// Linear resampling onto an arithmetic grid that starts at the first sample.
// The last original depth is always kept, even when the span is not a
// multiple of the spacing.
inline SoundSpeedProfile resampleUniform(const SoundSpeedProfile& profile, double spacingMeters) {
  if (!(spacingMeters > 0.0) || !std::isfinite(spacingMeters))
    throw ConfigError("resample spacing must be positive");
  const double top = profile.minDepth();
  const double bottom = profile.maxDepth();
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor((bottom - top) / spacingMeters + 1e-9));
  grid.reserve(steps + 2);
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(top + spacingMeters * static_cast<double>(i));
  // drop a node that would sit within rounding distance of the bottom
  if (bottom - grid.back() <= 1e-9 * std::max(1.0, bottom))
    grid.back() = bottom;
  else
    grid.push_back(bottom);
  auto speeds = interpolateAt(profile, grid);
  return profile.withSamples(std::move(grid), std::move(speeds));
}

inline std::vector<double> layerDepths(double maxDepth, std::size_t layerCount) {
  return evenlySpacedDepths(0.0, maxDepth, layerCount);
}

// Speeds at `layerCount` evenly spaced depths spanning [0, maxDepth]. This is
// the label representation used by the inverter network.
inline std::vector<double> downsampleToLayers(const SoundSpeedProfile& profile, std::size_t layerCount = 50) {
  if (layerCount < 2) throw ConfigError("layerCount must be >= 2");
  return interpolateAt(profile, layerDepths(profile.maxDepth(), layerCount));
}

// Profile on the layer grid, keeping metadata.
inline SoundSpeedProfile toLayerProfile(const SoundSpeedProfile& profile, std::size_t layerCount = 50) {
  auto grid = layerDepths(profile.maxDepth(), layerCount);
  auto speeds = interpolateAt(profile, grid);
  return profile.withSamples(std::move(grid), std::move(speeds));
}

}  // namespace sspinv
