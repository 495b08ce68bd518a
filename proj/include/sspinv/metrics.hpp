#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sspinv/error.hpp"

namespace sspinv {

// Depth interval (top, bottom]; the first band also owns depth `top` itself.
struct DepthBand {
  double top = 0.0;
  double bottom = 0.0;
  std::string label;
};

inline std::vector<DepthBand> defaultBands() {
  return {{0.0, 200.0, "0-200 (m)"}, {200.0, 800.0, "200-800 (m)"}, {800.0, 1300.0, "800-1300 (m)"},
          {1300.0, 3500.0, "1300-3500 (m)"}};
}

struct BandRmse {
  std::vector<double> perBand;
  std::vector<std::size_t> layerCounts;
  double average = 0.0;  // over all layers
};

inline std::size_t bandIndex(std::span<const DepthBand> bands, double depth) {
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (depth > bands[b].top && depth <= bands[b].bottom) return b;
    if (b == 0 && depth == bands[b].top) return b;
  }
  return bands.size();
}

// RMSE per band and over every layer. A layer sitting on a band edge counts
// toward the shallower band.
inline BandRmse rmseByBand(std::span<const double> depths, std::span<const double> truth,
                           std::span<const double> estimate, std::span<const DepthBand> bands) {
  if (truth.size() != estimate.size() || depths.size() != truth.size()) throw ShapeError("profiles are not on the same grid");
  if (truth.empty()) throw DataError("empty profile");
  BandRmse r;
  r.perBand.assign(bands.size(), 0.0);
  r.layerCounts.assign(bands.size(), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = estimate[i] - truth[i];
    total += e * e;
    const auto b = bandIndex(bands, depths[i]);
    if (b < bands.size()) {
      r.perBand[b] += e * e;
      ++r.layerCounts[b];
    }
  }
  for (std::size_t b = 0; b < bands.size(); ++b)
    r.perBand[b] = r.layerCounts[b] > 0 ? std::sqrt(r.perBand[b] / static_cast<double>(r.layerCounts[b])) : 0.0;
  r.average = std::sqrt(total / static_cast<double>(truth.size()));
  return r;
}

// One-sided sign test: P(X >= wins) for X ~ Binomial(trials, 1/2).
inline double signTestPValue(std::size_t wins, std::size_t trials) {
  if (wins > trials) throw DomainError("wins exceed trials");
  double p = 0.0;
  for (std::size_t k = wins; k <= trials; ++k) {
    const double logTerm = std::lgamma(static_cast<double>(trials) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                           std::lgamma(static_cast<double>(trials - k) + 1.0) -
                           static_cast<double>(trials) * std::log(2.0);
    p += std::exp(logTerm);
  }
  return std::min(p, 1.0);
}

}  // namespace sspinv
