#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "sspinv/error.hpp"
#include "sspinv/network.hpp"
#include "sspinv/profile.hpp"
#include "sspinv/ray.hpp"
#include "sspinv/spatiotemporal.hpp"

namespace sspinv {

// Defaults are the method's reference settings. l1Coefficient has no
// reference value and is kept small so the data term dominates.
struct MtlConfig {
  NetworkShape network{};
  std::size_t clusterCount = 10;       // K
  std::size_t clustersPerEpoch = 3;    // N
  std::size_t shotsPerCluster = 10;    // V
  std::size_t pretrainEpochs = 20;
  std::size_t taskEpochs = 20;         // J
  std::size_t taskShotsPerEpoch = 5;
  double baseRate = 0.000002;          // xi
  double taskBaseRate = 0.01;
  double l1Coefficient = 1e-4;         // mu
  double lambdaRate = 0.9;             // lambda_{tk,ri}
  bool perShotRegularizer = true;
  std::uint64_t seed = 1;

  void validate() const {
    if (clustersPerEpoch < 1 || clustersPerEpoch > clusterCount) throw ConfigError("need 1 <= N <= K");
    if (shotsPerCluster < 1 || taskShotsPerEpoch < 1) throw ConfigError("shot counts must be >= 1");
    if (!(baseRate > 0.0) || !(taskBaseRate > 0.0)) throw ConfigError("learning rates must be positive");
    if (!(l1Coefficient >= 0.0)) throw ConfigError("l1 coefficient must be >= 0");
    if (!(lambdaRate >= 0.0 && lambdaRate <= 1.0)) throw ConfigError("lambdaRate must lie in [0, 1]");
  }
};

namespace detail {

inline std::mt19937_64 streamRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// `count` indices from [0, n): distinct when n >= count, with replacement otherwise.
inline std::vector<std::size_t> drawIndices(std::size_t n, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  if (n >= count) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < count; ++i) out.push_back(pick(rng));
  }
  return out;
}

}  // namespace detail

// Multi-task learner state: one input->hidden matrix shared by every cluster
// and a private hidden->output matrix per cluster.
struct MultiTaskModel {
  Matrix sharedHidden;
  std::vector<Matrix> clusterOutputs;
  std::vector<double> lossHistory;  // summed cluster cost per epoch, before the update

  NetworkParams paramsFor(std::size_t cluster) const { return {sharedHidden, clusterOutputs.at(cluster)}; }
};

inline MultiTaskModel initMultiTaskModel(const MtlConfig& cfg, std::size_t clusterCount) {
  MultiTaskModel m;
  auto base = initParams(cfg.network, cfg.seed);
  m.sharedHidden = base.hidden;
  for (std::size_t k = 0; k < clusterCount; ++k)
    m.clusterOutputs.push_back(initParams(cfg.network, cfg.seed + 1000003ULL * (k + 1)).output);
  return m;
}

// One multi-task update. N clusters are drawn, V shots from each; every
// cluster's full-batch gradient is taken at the epoch-start weights, its
// private output matrix steps by xi/N, and the shared matrix takes the sum of
// the N hidden-layer steps.
inline double pretrainEpoch(MultiTaskModel& model, std::span<const std::vector<TrainingSample>> clusters,
                            const MtlConfig& cfg, std::size_t epochIndex) {
  cfg.validate();
  if (clusters.size() != model.clusterOutputs.size()) throw ShapeError("cluster count != model cluster heads");
  if (cfg.clustersPerEpoch > clusters.size()) throw ConfigError("N exceeds the number of clusters");
  auto rng = detail::streamRng(cfg.seed, 0x5eed0000ULL + epochIndex);
  const auto picked = detail::drawIndices(clusters.size(), cfg.clustersPerEpoch, rng);
  const double rate = cfg.baseRate / static_cast<double>(cfg.clustersPerEpoch);

  Matrix hiddenStep(model.sharedHidden.rows(), model.sharedHidden.cols());
  double loss = 0.0;
  for (std::size_t n : picked) {
    const auto& pool = clusters[n];
    if (pool.empty()) throw DataError("cluster " + std::to_string(n) + " has no samples");
    std::vector<TrainingSample> shots;
    for (std::size_t i : detail::drawIndices(pool.size(), cfg.shotsPerCluster, rng)) shots.push_back(pool[i]);
    const NetworkParams local{model.sharedHidden, model.clusterOutputs[n]};
    loss += pretrainCost(local, shots, cfg.l1Coefficient, cfg.perShotRegularizer);
    const auto g = pretrainGradient(local, shots, cfg.l1Coefficient, cfg.perShotRegularizer);
    applyStep(model.clusterOutputs[n], g.output, rate);
    auto acc = hiddenStep.data();
    const auto gh = g.hidden.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += gh[i];
  }
  applyStep(model.sharedHidden, hiddenStep, rate);
  model.lossHistory.push_back(loss);
  return loss;
}

inline MultiTaskModel pretrain(std::span<const std::vector<TrainingSample>> clusters, const MtlConfig& cfg) {
  cfg.validate();
  auto model = initMultiTaskModel(cfg, clusters.size());
  for (std::size_t e = 0; e < cfg.pretrainEpochs; ++e) pretrainEpoch(model, clusters, cfg, e);
  return model;
}

inline std::vector<double> inverseDistanceRates(std::span<const double> phi, double baseRate) {
  std::vector<double> eta(phi.size(), 0.0);
  const auto zeros = static_cast<std::size_t>(std::count(phi.begin(), phi.end(), 0.0));
  if (zeros > 0) {
    for (std::size_t i = 0; i < phi.size(); ++i)
      if (phi[i] == 0.0) eta[i] = baseRate / static_cast<double>(zeros);
    return eta;
  }
  double total = 0.0;
  for (double p : phi) {
    if (!(p > 0.0)) throw DomainError("spatio-temporal distances must be >= 0");
    total += 1.0 / p;
  }
  // equal distances: split evenly without the rounding of the normalization
  if (std::all_of(phi.begin(), phi.end(), [&](double p) { return p == phi.front(); })) {
    std::fill(eta.begin(), eta.end(), baseRate / static_cast<double>(phi.size()));
    return eta;
  }
  for (std::size_t i = 0; i < phi.size(); ++i) eta[i] = baseRate * (1.0 / phi[i]) / total;
  return eta;
}

// eta_i = base * (1/phi_i) / sum_j (1/phi_j). References at zero distance
// share the whole rate equally and the rest get nothing.
inline std::vector<double> taskLearningRates(const TaskMeta& task, std::span<const TaskMeta> references,
                                             double baseRate, double lambda) {
  if (references.empty()) throw DataError("no reference samples");
  std::vector<double> phi;
  phi.reserve(references.size());
  for (const auto& r : references) phi.push_back(spatioTemporalDistance(task, r, lambda));
  return inverseDistanceRates(phi, baseRate);
}

struct TaskTrainingResult {
  NetworkParams params;
  std::vector<double> lossHistory;  // mean per-draw cost, evaluated before each draw's step
};

// Shared by the task learner and the plain FNN baseline: J epochs, each
// drawing `shotsPerEpoch` samples and taking one SGD step per draw with that
// sample's own rate.
inline TaskTrainingResult trainTaskLearner(NetworkParams init, std::span<const TrainingSample> samples,
                                           std::span<const double> rates, std::size_t epochs,
                                           std::size_t shotsPerEpoch, std::uint64_t samplingSeed) {
  if (samples.empty()) throw DataError("no task samples");
  if (rates.size() != samples.size()) throw ShapeError("one learning rate per task sample required");
  if (shotsPerEpoch < 1) throw ConfigError("shots per epoch must be >= 1");
  TaskTrainingResult result{std::move(init), {}};
  auto rng = detail::streamRng(samplingSeed, 0x7a5cULL);
  for (std::size_t e = 0; e < epochs; ++e) {
    double loss = 0.0;
    const auto draws = detail::drawIndices(samples.size(), shotsPerEpoch, rng);
    for (std::size_t i : draws) {
      auto g = Gradient::zerosLike(result.params);
      loss += accumulateSquaredErrorGradient(result.params, samples[i], g);
      applyStep(result.params.hidden, g.hidden, rates[i]);
      applyStep(result.params.output, g.output, rates[i]);
    }
    result.lossHistory.push_back(loss / static_cast<double>(draws.size()));
  }
  return result;
}

inline std::vector<TaskMeta> metasOf(std::span<const TrainingSample> samples) {
  std::vector<TaskMeta> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.meta);
  return out;
}

// Task learner: pretrained input->hidden weights, fresh output weights,
// inverse spatio-temporal distance learning rates.
inline TaskTrainingResult finetuneTask(const Matrix& sharedHidden, std::span<const TrainingSample> taskSamples,
                                       const TaskMeta& task, const MtlConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (taskSamples.empty()) throw DataError("no task samples");
  auto init = initParams(cfg.network, seed);
  if (sharedHidden.rows() != init.hidden.rows() || sharedHidden.cols() != init.hidden.cols())
    throw ShapeError("pretrained hidden layer does not match the network shape");
  init.hidden = sharedHidden;
  const auto metas = metasOf(taskSamples);
  const auto rates = taskLearningRates(task, metas, cfg.taskBaseRate, cfg.lambdaRate);
  return trainTaskLearner(std::move(init), taskSamples, rates, cfg.taskEpochs, cfg.taskShotsPerEpoch, seed + 1);
}

// Forward pass, de-standardized, on the given depth grid.
inline SoundSpeedProfile invert(const NetworkParams& params, const TravelTimeObservation& observation,
                                const Standardizer& standardizer, std::span<const double> grid,
                                const GeoPoint& location = {}, int dayOfYear = 1, std::string id = "inverted") {
  const auto f = forward(params, standardizer.input(observation.times));
  if (f.output.size() != grid.size()) throw ShapeError("network output length != depth grid length");
  return SoundSpeedProfile({grid.begin(), grid.end()}, standardizer.speeds(f.output), location, dayOfYear,
                           std::move(id));
}

}  // namespace sspinv
