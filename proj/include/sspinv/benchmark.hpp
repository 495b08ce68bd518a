#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <unordered_set>
#include <vector>

#include "sspinv/baselines.hpp"
#include "sspinv/clustering.hpp"
#include "sspinv/eof.hpp"
#include "sspinv/error.hpp"
#include "sspinv/metrics.hpp"
#include "sspinv/mtl.hpp"
#include "sspinv/network.hpp"
#include "sspinv/profile.hpp"
#include "sspinv/ray.hpp"
#include "sspinv/spatiotemporal.hpp"
#include "sspinv/world.hpp"

namespace sspinv {

enum class Method { sip, mfp, fnn, mtl };

inline const char* methodName(Method m) {
  switch (m) {
    case Method::sip: return "SIP";
    case Method::mfp: return "EOF-MFP";
    case Method::fnn: return "FNN";
    case Method::mtl: return "MTL";
  }
  return "?";
}

inline Method methodFromName(const std::string& name) {
  for (Method m : {Method::sip, Method::mfp, Method::fnn, Method::mtl})
    if (name == methodName(m)) return m;
  if (name == "MFP" || name == "EOF_MFP") return Method::mfp;
  throw ConfigError("unknown method '" + name + "'");
}

inline std::vector<Method> allMethods() { return {Method::sip, Method::mfp, Method::fnn, Method::mtl}; }

struct BenchmarkConfig {
  SyntheticWorldConfig world{};
  ScenarioConfig scenario{};
  MtlConfig mtl{};
  TaskSelectionConfig selection{};
  PsoConfig pso{};
  std::size_t eofOrder = 3;
  std::size_t layerCount = 50;
  std::size_t maxTaskReferences = 13;
  std::uint64_t clusterSeed = 7;
  double fnnRate = kFnnRate;

  std::vector<Method> methods = allMethods();
  std::size_t repetitions = 100;
  std::uint64_t masterSeed = 20230415;
  std::size_t timingCalls = 100;
  std::size_t mfpTimingCalls = 1;
  std::size_t workers = 0;  // 0: hardware concurrency
};

// Everything that stays fixed across repetitions.
struct PreparedExperiment {
  PreparedExperiment(SyntheticWorld w, AcousticScenario g) : world(std::move(w)), geometry(std::move(g)) {}

  SyntheticWorld world;
  std::vector<double> grid;                  // layer depths
  std::vector<std::vector<double>> layers;   // historical layer speeds
  std::vector<double> truth;                 // task layer speeds
  TaskMeta taskMeta;
  std::vector<ProfileCluster> clusters;
  int taskCluster = 0;
  std::vector<std::size_t> referenceIndices; // into world.profiles
  std::vector<SoundSpeedProfile> references; // layer profiles
  std::vector<TravelTimeObservation> observations;
  TravelTimeObservation taskObservation;
  Standardizer standardizer;
  std::vector<TrainingSample> samples;                   // one per historical profile
  std::vector<std::vector<TrainingSample>> pretrainSets; // per cluster
  std::vector<TrainingSample> taskSamples;
  EofBasis referenceBasis;
  AcousticScenario geometry;
  std::vector<Position> pings;
};

namespace detail {

inline std::uint64_t mixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t repetitionSeed(std::uint64_t master, std::size_t repetition) {
  return detail::mixSeed(master, repetition);
}

inline PreparedExperiment prepareExperiment(const BenchmarkConfig& cfg) {
  if (cfg.scenario.inputCount() != cfg.mtl.network.inputs)
    throw ConfigError("pings x receivers must equal the network input size");
  if (cfg.layerCount != cfg.mtl.network.outputs) throw ConfigError("layer count must equal the network output size");

  auto world = generateWorld(cfg.world);
  const auto grid = layerDepths(cfg.world.maxDepth, cfg.layerCount);
  auto truth = downsampleToLayers(resampleUniform(world.task, 1.0), cfg.layerCount);
  PreparedExperiment ex(std::move(world), AcousticScenario{{0.0, 0.0, cfg.scenario.sourceDepth},
                                                           anchorPositions(cfg.scenario), LayeredMedium(grid, truth)});
  ex.grid = grid;
  ex.truth = std::move(truth);
  const auto& hist = ex.world.profiles;

  // leakage guard
  for (const auto& p : hist)
    if (p.id() == ex.world.task.id()) throw DataError("task profile leaked into the historical set");

  for (const auto& p : hist) ex.layers.push_back(downsampleToLayers(resampleUniform(p, 1.0), cfg.layerCount));
  ex.taskMeta = TaskMeta::of(ex.world.task);

  ex.clusters = clusterProfiles(hist, static_cast<int>(cfg.mtl.clusterCount), cfg.clusterSeed, {cfg.layerCount, 100});
  ex.taskCluster = selectTaskCluster(ex.taskMeta, ex.clusters, hist, cfg.selection);

  std::map<std::string, std::size_t> indexOf;
  for (std::size_t i = 0; i < hist.size(); ++i) indexOf.emplace(hist[i].id(), i);
  std::vector<std::pair<double, std::size_t>> members;
  for (const auto& c : ex.clusters) {
    if (c.id != ex.taskCluster) continue;
    for (const auto& id : c.members) {
      const auto i = indexOf.at(id);
      members.emplace_back(spatioTemporalDistance(ex.taskMeta, hist[i], cfg.selection.lambdaTk), i);
    }
  }
  std::stable_sort(members.begin(), members.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (members.size() > cfg.maxTaskReferences) members.resize(cfg.maxTaskReferences);
  for (const auto& [phi, i] : members) {
    ex.referenceIndices.push_back(i);
    ex.references.push_back(hist[i].withSamples(ex.grid, ex.layers[i]));
  }

  ex.pings = pingPositions(cfg.scenario);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const auto scen = makeScenario(cfg.scenario, ex.layers[i], cfg.world.maxDepth);
    ex.observations.push_back(
        simulateObservation(scen, ex.pings, cfg.scenario.noiseSigma, detail::mixSeed(cfg.world.seed, 1000 + i)));
  }
  ex.taskObservation = simulateObservation(makeScenario(cfg.scenario, ex.truth, cfg.world.maxDepth), ex.pings,
                                           cfg.scenario.noiseSigma, detail::mixSeed(cfg.world.seed, 999));

  std::vector<std::vector<double>> inputs;
  for (const auto& o : ex.observations) inputs.push_back(o.times);
  ex.standardizer = Standardizer::fit(inputs, ex.layers);
  for (std::size_t i = 0; i < hist.size(); ++i)
    ex.samples.push_back({ex.standardizer.input(ex.observations[i].times), ex.standardizer.label(ex.layers[i]),
                          TaskMeta::of(hist[i]), hist[i].id()});

  ex.pretrainSets.resize(ex.clusters.size());
  for (std::size_t c = 0; c < ex.clusters.size(); ++c)
    for (const auto& id : ex.clusters[c].members) ex.pretrainSets[c].push_back(ex.samples[indexOf.at(id)]);
  for (std::size_t i : ex.referenceIndices) ex.taskSamples.push_back(ex.samples[i]);

  ex.referenceBasis = buildEofBasis(ex.references, std::min(cfg.eofOrder, ex.references.size()));
  return ex;
}

struct MethodRun {
  std::optional<BandRmse> rmse;  // empty on failure
  std::vector<double> estimate;
  double inversionSeconds = 0.0;
  std::vector<double> lossHistory;
  std::string error;
};

struct RepetitionResult {
  std::uint64_t seed = 0;
  std::map<Method, MethodRun> runs;
};

namespace detail {

template <class F>
double medianSeconds(F&& call, std::size_t calls, bool warmUp) {
  if (warmUp) call();
  std::vector<double> t;
  for (std::size_t i = 0; i < std::max<std::size_t>(calls, 1); ++i) {
    const auto start = std::chrono::steady_clock::now();
    call();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
  return t[t.size() / 2];
}

}  // namespace detail

inline RepetitionResult runRepetition(const PreparedExperiment& ex, const BenchmarkConfig& cfg, std::size_t rep) {
  RepetitionResult out;
  out.seed = repetitionSeed(cfg.masterSeed, rep);
  const auto bands = defaultBands();

  for (Method m : cfg.methods) {
    MethodRun run;
    try {
      switch (m) {
        case Method::sip: {
          run.estimate = sipInvert(ex.taskMeta, ex.references);
          run.inversionSeconds = detail::medianSeconds([&] { return sipInvert(ex.taskMeta, ex.references); },
                                                       cfg.timingCalls, true);
          break;
        }
        case Method::mfp: {
          auto pso = cfg.pso;
          pso.seed = detail::mixSeed(out.seed, 3);
          const auto start = std::chrono::steady_clock::now();
          auto r = mfpInvert(ex.taskObservation, ex.referenceBasis, ex.geometry, ex.pings, ex.standardizer, pso);
          run.inversionSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          if (cfg.mfpTimingCalls > 1)
            run.inversionSeconds = detail::medianSeconds(
                [&] { return mfpInvert(ex.taskObservation, ex.referenceBasis, ex.geometry, ex.pings, ex.standardizer, pso); },
                cfg.mfpTimingCalls, false);
          run.estimate = std::move(r.speeds);
          break;
        }
        case Method::fnn: {
          auto trained = fnnTrain(ex.taskSamples, cfg.mtl, detail::mixSeed(out.seed, 2), cfg.fnnRate);
          run.lossHistory = trained.lossHistory;
          auto inverse = [&] { return ex.standardizer.speeds(forward(trained.params, ex.standardizer.input(ex.taskObservation.times)).output); };
          run.estimate = inverse();
          run.inversionSeconds = detail::medianSeconds(inverse, cfg.timingCalls, true);
          break;
        }
        case Method::mtl: {
          auto mcfg = cfg.mtl;
          mcfg.seed = detail::mixSeed(out.seed, 0);
          const auto model = pretrain(ex.pretrainSets, mcfg);
          auto trained = finetuneTask(model.sharedHidden, ex.taskSamples, ex.taskMeta, mcfg, detail::mixSeed(out.seed, 1));
          run.lossHistory = trained.lossHistory;
          auto inverse = [&] { return ex.standardizer.speeds(forward(trained.params, ex.standardizer.input(ex.taskObservation.times)).output); };
          run.estimate = inverse();
          run.inversionSeconds = detail::medianSeconds(inverse, cfg.timingCalls, true);
          break;
        }
      }
      for (double v : run.estimate)
        if (!std::isfinite(v)) throw DataError("non-finite estimate");
      run.rmse = rmseByBand(ex.grid, ex.truth, run.estimate, bands);
    } catch (const std::exception& e) {
      run.rmse.reset();
      run.error = e.what();
    }
    out.runs.emplace(m, std::move(run));
  }
  return out;
}

struct MethodSummary {
  Method method = Method::sip;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double averageRmse = 0.0;            // mean over repetitions of the all-layer RMSE
  std::vector<double> bandRmse;        // mean over repetitions, per band
  double inversionSeconds = 0.0;       // median over repetitions of per-repetition medians
  std::vector<double> meanLossHistory; // mean over repetitions, per task epoch
};

struct ComparisonStat {
  Method better = Method::mtl;
  Method other = Method::fnn;
  std::size_t wins = 0;
  std::size_t trials = 0;
  double pValue = 1.0;
};

struct ExperimentReport {
  std::vector<DepthBand> bands;
  std::size_t repetitions = 0;
  std::uint64_t masterSeed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodSummary> methods;
  std::vector<ComparisonStat> comparisons;
  std::vector<RepetitionResult> runs;
  std::vector<double> grid;
  std::vector<double> truth;
};

inline ComparisonStat compareMethods(const std::vector<RepetitionResult>& runs, Method better, Method other) {
  ComparisonStat s{better, other, 0, 0, 1.0};
  for (const auto& r : runs) {
    const auto a = r.runs.find(better);
    const auto b = r.runs.find(other);
    if (a == r.runs.end() || b == r.runs.end() || !a->second.rmse || !b->second.rmse) continue;
    ++s.trials;
    if (a->second.rmse->average < b->second.rmse->average) ++s.wins;
  }
  s.pValue = signTestPValue(s.wins, s.trials);
  return s;
}

inline ExperimentReport summarize(const PreparedExperiment& ex, const BenchmarkConfig& cfg,
                                  std::vector<RepetitionResult> runs) {
  ExperimentReport rep;
  rep.bands = defaultBands();
  rep.repetitions = runs.size();
  rep.masterSeed = cfg.masterSeed;
  rep.grid = ex.grid;
  rep.truth = ex.truth;
  for (const auto& r : runs) rep.seeds.push_back(r.seed);

  for (Method m : cfg.methods) {
    MethodSummary s;
    s.method = m;
    s.bandRmse.assign(rep.bands.size(), 0.0);
    std::vector<double> times;
    std::vector<double> lossSum;
    for (const auto& r : runs) {
      const auto& run = r.runs.at(m);
      if (!run.rmse) {
        ++s.failures;
        continue;
      }
      ++s.successes;
      s.averageRmse += run.rmse->average;
      for (std::size_t b = 0; b < s.bandRmse.size(); ++b) s.bandRmse[b] += run.rmse->perBand[b];
      times.push_back(run.inversionSeconds);
      if (lossSum.size() < run.lossHistory.size()) lossSum.resize(run.lossHistory.size(), 0.0);
      for (std::size_t e = 0; e < run.lossHistory.size(); ++e) lossSum[e] += run.lossHistory[e];
    }
    if (s.successes > 0) {
      const double n = static_cast<double>(s.successes);
      s.averageRmse /= n;
      for (double& b : s.bandRmse) b /= n;
      for (double& l : lossSum) l /= n;
      std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
      s.inversionSeconds = times[times.size() / 2];
    }
    s.meanLossHistory = std::move(lossSum);
    rep.methods.push_back(std::move(s));
  }

  auto has = [&](Method m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end(); };
  if (has(Method::mtl))
    for (Method other : {Method::sip, Method::mfp, Method::fnn})
      if (has(other)) rep.comparisons.push_back(compareMethods(runs, Method::mtl, other));
  rep.runs = std::move(runs);
  return rep;
}

// Repetitions run on a worker pool; each writes only its own slot, and the
// summary reduces them in repetition order.
inline ExperimentReport runBenchmark(const PreparedExperiment& ex, const BenchmarkConfig& cfg) {
  std::vector<RepetitionResult> runs(cfg.repetitions);
  std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(cfg.repetitions, 1));
  if (workers <= 1) {
    for (std::size_t r = 0; r < cfg.repetitions; ++r) runs[r] = runRepetition(ex, cfg, r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < cfg.repetitions; r += workers) runs[r] = runRepetition(ex, cfg, r);
      });
    for (auto& t : pool) t.join();
  }
  return summarize(ex, cfg, std::move(runs));
}

inline ExperimentReport runBenchmark(const BenchmarkConfig& cfg) { return runBenchmark(prepareExperiment(cfg), cfg); }

}  // namespace sspinv
