#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "sspinv/eof.hpp"
#include "sspinv/error.hpp"
#include "sspinv/mtl.hpp"
#include "sspinv/network.hpp"
#include "sspinv/profile.hpp"
#include "sspinv/ray.hpp"
#include "sspinv/spatiotemporal.hpp"

namespace sspinv {

// ---------------------------------------------------------------------------
// Spatial interpolation

// Inverse spatial-distance weights (time is ignored). References at zero
// distance take all the weight, shared equally.
inline std::vector<double> sipWeights(const TaskMeta& task, std::span<const TaskMeta> references) {
  if (references.empty()) throw DataError("spatial interpolation needs at least one reference");
  std::vector<double> dist;
  for (const auto& r : references) dist.push_back(spatialDistance(task.location, r.location));
  std::vector<double> w(dist.size(), 0.0);
  const auto zeros = static_cast<std::size_t>(std::count(dist.begin(), dist.end(), 0.0));
  if (zeros > 0) {
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (dist[i] == 0.0) w[i] = 1.0 / static_cast<double>(zeros);
    return w;
  }
  double total = 0.0;
  for (double d : dist) total += 1.0 / d;
  for (std::size_t i = 0; i < dist.size(); ++i) w[i] = (1.0 / dist[i]) / total;
  return w;
}

inline std::vector<double> sipInvert(const TaskMeta& task, std::span<const SoundSpeedProfile> references) {
  if (references.empty()) throw DataError("spatial interpolation needs at least one reference");
  std::vector<TaskMeta> metas;
  for (const auto& r : references) {
    if (r.size() != references.front().size()) throw ShapeError("references are not on a common grid");
    metas.push_back(TaskMeta::of(r));
  }
  const auto w = sipWeights(task, metas);
  std::vector<double> out(references.front().size(), 0.0);
  for (std::size_t i = 0; i < references.size(); ++i) {
    if (w[i] == 0.0) continue;
    const auto s = references[i].speeds();
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += w[i] * s[d];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Particle swarm

struct PsoConfig {
  std::size_t particles = 20;
  std::size_t iterations = 30;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  double boundScale = 3.0;  // coefficient bounds are +- boundScale * sqrt(eigenvalue)
  std::uint64_t seed = 1;

  void validate() const {
    if (particles < 2) throw ConfigError("PSO needs at least 2 particles");
    if (iterations < 1) throw ConfigError("PSO needs at least 1 iteration");
    if (!std::isfinite(boundScale) || boundScale < 0.0) throw ConfigError("PSO bound scale must be finite");
  }
};

struct PsoResult {
  std::vector<double> best;
  double bestFitness = std::numeric_limits<double>::infinity();
  std::vector<double> history;  // global best after initialization and after every iteration
};

// Global-best PSO with velocity clamped to half the search range per axis.
inline PsoResult minimizePso(const std::function<double(std::span<const double>)>& fitness,
                             std::span<const double> lower, std::span<const double> upper, const PsoConfig& cfg) {
  cfg.validate();
  const std::size_t dim = lower.size();
  if (upper.size() != dim) throw ShapeError("PSO bounds differ in length");
  for (std::size_t k = 0; k < dim; ++k)
    if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || lower[k] > upper[k]) throw ConfigError("PSO bounds invalid");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> vmax(dim);
  for (std::size_t k = 0; k < dim; ++k) vmax[k] = 0.5 * (upper[k] - lower[k]);

  std::vector<std::vector<double>> x(cfg.particles, std::vector<double>(dim)), v = x, pbest;
  std::vector<double> pbestFit(cfg.particles);
  for (std::size_t i = 0; i < cfg.particles; ++i)
    for (std::size_t k = 0; k < dim; ++k) {
      x[i][k] = lower[k] + (upper[k] - lower[k]) * u01(rng);
      v[i][k] = vmax[k] * (2.0 * u01(rng) - 1.0);
    }
  pbest = x;

  auto safeFitness = [&](std::span<const double> p) {
    const double f = fitness(p);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  PsoResult result;
  result.best = x.front();
  for (std::size_t i = 0; i < cfg.particles; ++i) {
    pbestFit[i] = safeFitness(x[i]);
    if (pbestFit[i] < result.bestFitness) {
      result.bestFitness = pbestFit[i];
      result.best = x[i];
    }
  }
  result.history.push_back(result.bestFitness);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t i = 0; i < cfg.particles; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        const double r1 = u01(rng);
        const double r2 = u01(rng);
        double vel = cfg.inertia * v[i][k] + cfg.cognitive * r1 * (pbest[i][k] - x[i][k]) +
                     cfg.social * r2 * (result.best[k] - x[i][k]);
        vel = std::clamp(vel, -vmax[k], vmax[k]);
        v[i][k] = vel;
        x[i][k] = std::clamp(x[i][k] + vel, lower[k], upper[k]);
      }
    }
    // fitness evaluations are independent; the global-best update below is
    // the synchronization point
    for (std::size_t i = 0; i < cfg.particles; ++i) {
      const double f = safeFitness(x[i]);
      if (f < pbestFit[i]) {
        pbestFit[i] = f;
        pbest[i] = x[i];
      }
      if (f < result.bestFitness) {
        result.bestFitness = f;
        result.best = x[i];
      }
    }
    result.history.push_back(result.bestFitness);
  }
  return result;
}

// ---------------------------------------------------------------------------
// EOF matched-field processing

struct MfpResult {
  std::vector<double> speeds;
  std::vector<double> coefficients;
  PsoResult search;
};

// Misfit between a candidate profile's simulated field and the observation,
// measured on standardized times. Turning rays or unphysical speeds give +inf.
inline double mfpFitness(std::span<const double> speeds, std::span<const double> grid,
                         const TravelTimeObservation& observation, const AcousticScenario& geometry,
                         std::span<const Position> pings, const Standardizer& standardizer) {
  try {
    AcousticScenario candidate{geometry.source, geometry.receivers,
                               LayeredMedium({grid.begin(), grid.end()}, {speeds.begin(), speeds.end()})};
    const auto sim = simulateObservation(candidate, pings, 0.0, 0);
    const auto a = standardizer.input(sim.times);
    const auto b = standardizer.input(observation.times);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  } catch (const DataError&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline std::vector<double> mfpBounds(const EofBasis& basis, double scale, double sign) {
  std::vector<double> b;
  for (double lambda : basis.values) b.push_back(sign * scale * std::sqrt(std::max(lambda, 0.0)));
  return b;
}

inline MfpResult mfpInvert(const TravelTimeObservation& observation, const EofBasis& basis,
                           const AcousticScenario& geometry, std::span<const Position> pings,
                           const Standardizer& standardizer, const PsoConfig& pso) {
  observation.validate();
  if (observation.times.size() != pings.size() * geometry.receivers.size())
    throw ShapeError("observation does not match the ping/receiver geometry");
  const auto lower = mfpBounds(basis, pso.boundScale, -1.0);
  const auto upper = mfpBounds(basis, pso.boundScale, 1.0);
  auto fitness = [&](std::span<const double> cf) {
    const auto speeds = basis.reconstruct(cf);
    return mfpFitness(speeds, basis.grid, observation, geometry, pings, standardizer);
  };
  MfpResult r;
  r.search = minimizePso(fitness, lower, upper, pso);
  r.coefficients = r.search.best;
  r.speeds = basis.reconstruct(r.coefficients);
  return r;
}

// ---------------------------------------------------------------------------
// Plain feed-forward network

inline constexpr double kFnnRate = 0.01;

// Random initialization of both layers, one fixed rate for every sample;
// otherwise the same training loop as the task learner.
inline TaskTrainingResult fnnTrain(std::span<const TrainingSample> taskSamples, const MtlConfig& cfg,
                                   std::uint64_t seed, double rate = kFnnRate) {
  if (taskSamples.empty()) throw DataError("no task samples");
  const std::vector<double> rates(taskSamples.size(), rate);
  return trainTaskLearner(initParams(cfg.network, seed), taskSamples, rates, cfg.taskEpochs, cfg.taskShotsPerEpoch,
                          seed + 1);
}

inline std::vector<double> fnnInvert(std::span<const TrainingSample> taskSamples, const TravelTimeObservation& observation,
                                     const Standardizer& standardizer, const MtlConfig& cfg, std::uint64_t seed,
                                     double rate = kFnnRate) {
  const auto trained = fnnTrain(taskSamples, cfg, seed, rate);
  return standardizer.speeds(forward(trained.params, standardizer.input(observation.times)).output);
}

}  // namespace sspinv
