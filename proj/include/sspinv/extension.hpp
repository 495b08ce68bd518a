#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sspinv/eof.hpp"
#include "sspinv/error.hpp"
#include "sspinv/linalg.hpp"
#include "sspinv/profile.hpp"

namespace sspinv {

// How partial-depth coefficients are carried onto full-depth modes.
enum class ModePairing {
  // Re-express the partial-depth coefficients in the coordinates of the
  // truncated full-depth modes (solve (V_K^T T) c = cf). Exact for targets in
  // the span of the retained full-depth modes.
  transfer,
  // Multiply cf directly by the full-depth modes of equal rank.
  rank,
};

struct ExtensionOptions {
  std::size_t partialOrder = 3;
  std::size_t fullOrder = 3;
  bool fullResolution = false;   // 1 m grid instead of the layer grid
  std::size_t layerCount = 50;
  ModePairing pairing = ModePairing::transfer;
  double crossFadeMeters = 20.0;
};

struct ExtensionResult {
  SoundSpeedProfile reconstruction;  // basis reconstruction on the full grid
  SoundSpeedProfile spliced;         // measured section + reconstruction below it
  EofCoefficients partialCoefficients;
  std::vector<double> fullCoefficients;
  EofBasis partialBasis;
  EofBasis fullBasis;
};

namespace detail {

inline std::vector<double> fullGridFor(double maxDepth, const ExtensionOptions& opts) {
  if (!opts.fullResolution) return layerDepths(maxDepth, opts.layerCount);
  std::vector<double> grid;
  for (double z = 0.0; z < maxDepth - 1e-9; z += 1.0) grid.push_back(z);
  grid.push_back(maxDepth);
  return grid;
}

// Linear interpolation of values sampled on `grid` at `depth`.
inline double interpolateOnGrid(std::span<const double> grid, std::span<const double> values, double depth) {
  if (depth <= grid.front()) return values.front();
  if (depth >= grid.back()) return values.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), depth) - grid.begin());
  const auto lo = hi - 1;
  const double t = (depth - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

}  // namespace detail

// Full-depth reconstruction of a partial-depth profile from an empirical set
// of full-depth profiles: intercept, decompose at both depths, match the
// target against the partial-depth modes, rebuild with the full-depth modes.
inline ExtensionResult extendProfileDetailed(const SoundSpeedProfile& partialTarget,
                                             std::span<const SoundSpeedProfile> empiricalFull,
                                             const ExtensionOptions& opts = {}) {
  if (opts.partialOrder != opts.fullOrder) throw ConfigError("partial and full retain orders must be equal");
  if (opts.partialOrder < 1 || opts.partialOrder > 6) throw ConfigError("retain order must lie in [1, 6]");
  if (empiricalFull.size() < 2) throw DataError("extension needs at least 2 empirical profiles");
  const std::size_t order = opts.partialOrder;

  double commonDepth = empiricalFull.front().maxDepth();
  for (const auto& p : empiricalFull) commonDepth = std::min(commonDepth, p.maxDepth());
  const double cut = partialTarget.maxDepth();
  if (commonDepth < cut)
    throw DepthCoverageError("empirical profiles reach only " + std::to_string(commonDepth) + " m, target reaches " +
                             std::to_string(cut) + " m");

  const auto fullGrid = detail::fullGridFor(commonDepth, opts);
  std::vector<double> partialGrid;
  for (double z : fullGrid)
    if (z < cut - 1e-9) partialGrid.push_back(z);
  partialGrid.push_back(cut);
  if (partialGrid.size() < 2) throw DataError("target profile is too shallow to extend");

  const auto intercepted = interceptProfiles(empiricalFull, cut);
  std::vector<std::vector<double>> fullSpeeds, partialSpeeds;
  for (std::size_t i = 0; i < empiricalFull.size(); ++i) {
    fullSpeeds.push_back(interpolateAt(empiricalFull[i], fullGrid));
    partialSpeeds.push_back(interpolateAt(intercepted[i], partialGrid));
  }
  auto partialBasis = buildEofBasis(partialGrid, partialSpeeds, order);
  auto fullBasis = buildEofBasis(fullGrid, fullSpeeds, order);

  // truncated full-depth modes on the partial grid; flip signs to agree with
  // the partial-depth mode of the same rank
  Matrix truncated(partialGrid.size(), order);
  for (std::size_t k = 0; k < order; ++k) {
    const auto col = fullBasis.vectors.column(k);
    double agreement = 0.0;
    for (std::size_t r = 0; r < partialGrid.size(); ++r) {
      truncated(r, k) = detail::interpolateOnGrid(fullGrid, col, partialGrid[r]);
      agreement += truncated(r, k) * partialBasis.vectors(r, k);
    }
    if (agreement < 0.0) {
      for (std::size_t r = 0; r < fullGrid.size(); ++r) fullBasis.vectors(r, k) = -fullBasis.vectors(r, k);
      for (std::size_t r = 0; r < partialGrid.size(); ++r) truncated(r, k) = -truncated(r, k);
    }
  }

  const auto targetSpeeds = interpolateAt(partialTarget, partialGrid);
  auto cf = projectOntoBasis(partialBasis, targetSpeeds);

  std::vector<double> coefficients = cf.values;
  if (opts.pairing == ModePairing::transfer) {
    Matrix pairing(order, order);
    for (std::size_t i = 0; i < order; ++i)
      for (std::size_t j = 0; j < order; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < partialGrid.size(); ++r) s += partialBasis.vectors(r, i) * truncated(r, j);
        pairing(i, j) = s;
      }
    coefficients = solveLinear(pairing, cf.values);
  }
  const auto rebuilt = fullBasis.reconstruct(coefficients);
  auto reconstruction = partialTarget.withSamples(fullGrid, rebuilt);

  // splice: measured samples down to the cut, reconstruction below, with the
  // junction offset faded out linearly over crossFadeMeters
  const double offset = partialTarget.speedAt(cut) - detail::interpolateOnGrid(fullGrid, rebuilt, cut);
  std::vector<double> depths(partialTarget.depths().begin(), partialTarget.depths().end());
  std::vector<double> speeds(partialTarget.speeds().begin(), partialTarget.speeds().end());
  for (std::size_t r = 0; r < fullGrid.size(); ++r) {
    const double z = fullGrid[r];
    if (z <= cut + 1e-9) continue;
    double s = rebuilt[r];
    if (opts.crossFadeMeters > 0.0 && z - cut < opts.crossFadeMeters) s += offset * (1.0 - (z - cut) / opts.crossFadeMeters);
    depths.push_back(z);
    speeds.push_back(s);
  }

  return ExtensionResult{std::move(reconstruction), partialTarget.withSamples(std::move(depths), std::move(speeds)),
                         std::move(cf), std::move(coefficients), std::move(partialBasis), std::move(fullBasis)};
}

inline SoundSpeedProfile extendProfile(const SoundSpeedProfile& partialTarget,
                                       std::span<const SoundSpeedProfile> empiricalFull,
                                       const ExtensionOptions& opts = {}) {
  return extendProfileDetailed(partialTarget, empiricalFull, opts).spliced;
}

struct LinearExtension {
  SoundSpeedProfile profile;
  bool extended = true;  // false: target depth not below the profile, nothing appended
};

// Appends 1 m samples below the profile following the least-squares gradient
// of its last `windowMeters`.
inline LinearExtension linearExtend(const SoundSpeedProfile& profile, double toDepth, double windowMeters = 50.0) {
  if (!(windowMeters > 0.0)) throw ConfigError("gradient window must be positive");
  if (toDepth <= profile.maxDepth()) return {profile, false};
  const double bottom = profile.maxDepth();
  if (bottom - profile.minDepth() < windowMeters)
    throw DepthCoverageError("profile spans less than the gradient window");

  double sz = 0.0, ss = 0.0, szz = 0.0, szs = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double z = profile.depths()[i];
    if (z < bottom - windowMeters - 1e-9) continue;
    const double s = profile.speeds()[i];
    sz += z;
    ss += s;
    szz += z * z;
    szs += z * s;
    ++count;
  }
  if (count < 2) throw DataError("fewer than 2 samples inside the gradient window");
  const double n = static_cast<double>(count);
  const double slope = (n * szs - sz * ss) / (n * szz - sz * sz);

  std::vector<double> depths(profile.depths().begin(), profile.depths().end());
  std::vector<double> speeds(profile.speeds().begin(), profile.speeds().end());
  const double last = speeds.back();
  for (double z = bottom + 1.0; z < toDepth - 1e-9; z += 1.0) {
    depths.push_back(z);
    speeds.push_back(last + slope * (z - bottom));
  }
  depths.push_back(toDepth);
  speeds.push_back(last + slope * (toDepth - bottom));
  return {profile.withSamples(std::move(depths), std::move(speeds)), true};
}

struct TwoStepOptions {
  double eofDepth = 3200.0;
  double finalDepth = 3500.0;
  double gradientWindow = 50.0;
  ExtensionOptions eof{};
};

// EOF matching down to eofDepth, then linear extension to finalDepth, on a 1 m grid.
inline SoundSpeedProfile twoStepExtend(const SoundSpeedProfile& partialTarget,
                                       std::span<const SoundSpeedProfile> empiricalFull,
                                       const TwoStepOptions& opts = {}) {
  SoundSpeedProfile current = partialTarget;
  if (current.maxDepth() < opts.eofDepth) {
    const auto shallow = interceptProfiles(empiricalFull, opts.eofDepth);
    current = extendProfile(current, shallow, opts.eof);
  }
  current = resampleUniform(current, 1.0);
  return linearExtend(current, opts.finalDepth, opts.gradientWindow).profile;
}

}  // namespace sspinv
