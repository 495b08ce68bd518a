// Command-line front end. Exit codes: 0 ok, 2 config error, 3 data error.
#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sspinv.hpp"

namespace fs = std::filesystem;
using namespace sspinv;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

void addCommon(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file (defaults are used for missing keys)");
  sub->add_option("--seed", c.seed, "seed override for this subcommand");
  sub->add_option("--out", c.out, "output directory");
}

ToolkitConfig loadOrDefault(const Common& c) {
  if (c.config.empty()) return ToolkitConfig{};
  return loadConfig(c.config);
}

fs::path outDir(const Common& c) {
  fs::path p(c.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw DataError("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

void writeText(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
}

void writeSeries(const fs::path& p, const char* header, const std::vector<double>& v) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  out << "epoch," << header << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) out << i + 1 << ',' << io::formatNumber(v[i]) << '\n';
}

// References on a shared layer grid spanning their common depth.
std::vector<SoundSpeedProfile> layerReferences(const std::vector<SoundSpeedProfile>& refs, std::size_t layers) {
  if (refs.empty()) throw DataError("no reference profiles");
  double depth = refs.front().maxDepth();
  for (const auto& r : refs) depth = std::min(depth, r.maxDepth());
  const auto grid = layerDepths(depth, layers);
  std::vector<SoundSpeedProfile> out;
  for (const auto& r : refs) out.push_back(r.withSamples(grid, interpolateAt(r, grid)));
  return out;
}

struct ReferenceTraining {
  std::vector<SoundSpeedProfile> layered;
  Standardizer standardizer;
  std::vector<TrainingSample> samples;
};

// Simulates each reference's observation in the configured geometry and
// standardizes inputs and labels on that set.
ReferenceTraining simulateReferences(const std::vector<SoundSpeedProfile>& refs, const BenchmarkConfig& b,
                                     std::uint64_t seed) {
  ReferenceTraining t;
  t.layered = layerReferences(refs, b.layerCount);
  const auto pings = pingPositions(b.scenario);
  std::vector<std::vector<double>> inputs, labels;
  for (std::size_t i = 0; i < t.layered.size(); ++i) {
    const auto& p = t.layered[i];
    const auto obs = simulateObservation(makeScenario(b.scenario, p.speeds(), p.maxDepth()), pings,
                                         b.scenario.noiseSigma, seed + i);
    inputs.push_back(obs.times);
    labels.emplace_back(p.speeds().begin(), p.speeds().end());
  }
  t.standardizer = Standardizer::fit(inputs, labels);
  for (std::size_t i = 0; i < t.layered.size(); ++i)
    t.samples.push_back({t.standardizer.input(inputs[i]), t.standardizer.label(labels[i]), TaskMeta::of(t.layered[i]),
                         t.layered[i].id()});
  return t;
}

int genWorld(const Common& c) {
  auto cfg = loadOrDefault(c);
  if (c.seed) cfg.benchmark.world.seed = *c.seed;
  const auto dir = outDir(c);
  const auto world = generateWorld(cfg.benchmark.world);
  fs::create_directories(dir / "profiles");
  for (const auto& p : world.profiles) io::writeProfileCsv(dir / "profiles" / (p.id() + ".csv"), p);
  io::writeProfileCsv(dir / "task.csv", world.task);
  const auto clusters = clusterProfiles(world.profiles, static_cast<int>(cfg.benchmark.mtl.clusterCount),
                                        cfg.benchmark.clusterSeed, {cfg.benchmark.layerCount, 100});
  io::writeJsonFile(dir / "clusters.json", io::clusterManifestToJson(clusters));
  std::cout << "wrote " << world.profiles.size() << " profiles, task.csv and clusters.json to " << dir << '\n';
  return 0;
}

int extend(const Common& c, const std::string& input, const std::string& refsDir) {
  const auto cfg = loadOrDefault(c);
  const auto dir = outDir(c);
  const auto target = io::readProfileCsv(fs::path(input));
  const auto refs = io::readProfileDirectory(refsDir);
  const auto& opts = cfg.extension;
  SoundSpeedProfile current = target;
  std::optional<EofBasis> basis;
  if (current.maxDepth() < opts.eofDepth) {
    const auto shallow = interceptProfiles(refs, opts.eofDepth);
    auto detailed = extendProfileDetailed(current, shallow, opts.eof);
    basis = detailed.fullBasis;
    current = detailed.spliced;
  }
  current = linearExtend(resampleUniform(current, 1.0), opts.finalDepth, opts.gradientWindow).profile;
  io::writeProfileCsv(dir / "extended.csv", current);
  if (basis) io::writeJsonFile(dir / "basis.json", basisToJson(*basis));
  std::cout << "extended " << target.id() << " from " << target.maxDepth() << " m to " << current.maxDepth() << " m\n";
  return 0;
}

int simulate(const Common& c, const std::string& profilePath) {
  const auto cfg = loadOrDefault(c);
  const auto dir = outDir(c);
  const auto& sc = cfg.benchmark.scenario;
  const auto profile = io::readProfileCsv(fs::path(profilePath));
  const std::uint64_t seed = c.seed.value_or(cfg.benchmark.world.seed);
  const auto layered = toLayerProfile(profile, sc.simulationLayers);
  const auto obs = simulateObservation(makeScenario(sc, layered.speeds(), layered.maxDepth()), pingPositions(sc),
                                       sc.noiseSigma, seed);
  io::writeObservationCsv(dir / "observation.csv", obs, sc.noiseSigma, seed);
  std::cout << "simulated " << obs.pingCount << " pings x " << obs.receiverCount << " receivers\n";
  return 0;
}

int pretrainCmd(const Common& c) {
  auto cfg = loadOrDefault(c);
  if (c.seed) cfg.benchmark.mtl.seed = *c.seed;
  const auto dir = outDir(c);
  const auto ex = prepareExperiment(cfg.benchmark);
  const auto model = pretrain(ex.pretrainSets, cfg.benchmark.mtl);
  const auto task = finetuneTask(model.sharedHidden, ex.taskSamples, ex.taskMeta, cfg.benchmark.mtl,
                                 cfg.benchmark.mtl.seed + 1);
  io::Checkpoint ck{configToJson(cfg), cfg.benchmark.mtl.seed, ex.grid, ex.standardizer, task.params};
  io::writeJsonFile(dir / "checkpoint.json", io::checkpointToJson(ck));
  writeSeries(dir / "pretrain_loss.csv", "loss", model.lossHistory);
  writeSeries(dir / "task_loss.csv", "loss", task.lossHistory);
  io::writeObservationCsv(dir / "task_observation.csv", ex.taskObservation, cfg.benchmark.scenario.noiseSigma, 0);
  io::writeProfileCsv(dir / "task_truth.csv", ex.world.task.withSamples(ex.grid, ex.truth));
  std::cout << "task cluster " << ex.taskCluster << ", " << ex.taskSamples.size() << " task references; wrote "
            << (dir / "checkpoint.json") << '\n';
  return 0;
}

int invertCmd(const Common& c, const std::string& checkpointPath, const std::string& observationPath) {
  const auto dir = outDir(c);
  const auto ck = io::checkpointFromJson(io::readJsonFile(checkpointPath));
  const auto obs = io::readObservationCsv(fs::path(observationPath)).observation;
  const auto profile = invert(ck.params, obs, ck.standardizer, ck.grid);
  io::writeProfileCsv(dir / "inverted.csv", profile);
  std::cout << "wrote " << (dir / "inverted.csv") << '\n';
  return 0;
}

int benchmarkCmd(const Common& c, std::optional<std::size_t> reps) {
  auto cfg = loadOrDefault(c);
  if (c.seed) cfg.benchmark.masterSeed = *c.seed;
  if (reps) cfg.benchmark.repetitions = *reps;
  const auto dir = outDir(c);
  const auto report = runBenchmark(cfg.benchmark);
  auto j = reportToJson(report);
  j["config"] = configToJson(cfg);
  io::writeJsonFile(dir / "report.json", j);
  const auto md = reportMarkdown(report);
  writeText(dir / "report.md", md);
  std::cout << md;
  return 0;
}

int plotData(const Common& c, const std::string& reportPath) {
  const auto dir = outDir(c);
  const auto files = emitPlotData(plotInputFromReportJson(io::readJsonFile(reportPath)), dir);
  std::cout << "wrote " << files.profilesCsv << ", " << files.lossCsv << " and SVG renderings\n";
  return 0;
}

std::optional<TaskMeta> taskMetaFrom(const std::string& taskPath, std::optional<double> lon, std::optional<double> lat,
                                     std::optional<int> day) {
  if (!taskPath.empty()) return TaskMeta::of(io::readProfileCsv(fs::path(taskPath)));
  if (lon && lat && day) return TaskMeta{CodedLocation::fromGeo({*lon, *lat}), normalizeDayOfYear(*day)};
  return std::nullopt;
}

int sipCmd(const Common& c, const std::string& refsDir, const std::optional<TaskMeta>& task) {
  const auto cfg = loadOrDefault(c);
  if (!task) throw ConfigError("sip needs --task or all of --lon/--lat/--day");
  const auto dir = outDir(c);
  const auto refs = layerReferences(io::readProfileDirectory(refsDir), cfg.benchmark.layerCount);
  const auto speeds = sipInvert(*task, refs);
  const auto grid = refs.front().depths();
  io::writeProfileCsv(dir / "sip.csv", SoundSpeedProfile({grid.begin(), grid.end()}, speeds, {}, 1, "sip"));
  std::cout << "wrote " << (dir / "sip.csv") << '\n';
  return 0;
}

int mfpCmd(const Common& c, const std::string& refsDir, const std::string& observationPath) {
  auto cfg = loadOrDefault(c);
  const auto& b = cfg.benchmark;
  auto pso = b.pso;
  if (c.seed) pso.seed = *c.seed;
  const auto dir = outDir(c);
  const auto obs = io::readObservationCsv(fs::path(observationPath)).observation;
  const auto train = simulateReferences(io::readProfileDirectory(refsDir), b, b.world.seed);
  const auto basis = buildEofBasis(train.layered, std::min(b.eofOrder, train.layered.size()));
  const auto& grid = train.layered.front().depths();
  AcousticScenario geometry{{0.0, 0.0, b.scenario.sourceDepth}, anchorPositions(b.scenario),
                            LayeredMedium({grid.begin(), grid.end()}, basis.mean)};
  const auto r = mfpInvert(obs, basis, geometry, pingPositions(b.scenario), train.standardizer, pso);
  io::writeProfileCsv(dir / "mfp.csv", SoundSpeedProfile({grid.begin(), grid.end()}, r.speeds, {}, 1, "mfp"));
  std::cout << "best misfit " << r.search.bestFitness << "; wrote " << (dir / "mfp.csv") << '\n';
  return 0;
}

int fnnCmd(const Common& c, const std::string& refsDir, const std::string& observationPath) {
  auto cfg = loadOrDefault(c);
  const auto& b = cfg.benchmark;
  const std::uint64_t seed = c.seed.value_or(b.mtl.seed);
  const auto dir = outDir(c);
  const auto obs = io::readObservationCsv(fs::path(observationPath)).observation;
  const auto train = simulateReferences(io::readProfileDirectory(refsDir), b, b.world.seed);
  const auto trained = fnnTrain(train.samples, b.mtl, seed, b.fnnRate);
  const auto& grid = train.layered.front().depths();
  const auto profile = invert(trained.params, obs, train.standardizer, grid, {}, 1, "fnn");
  io::writeProfileCsv(dir / "fnn.csv", profile);
  io::Checkpoint ck{configToJson(cfg), seed, {grid.begin(), grid.end()}, train.standardizer, trained.params};
  io::writeJsonFile(dir / "checkpoint_fnn.json", io::checkpointToJson(ck));
  writeSeries(dir / "fnn_loss.csv", "loss", trained.lossHistory);
  std::cout << "wrote " << (dir / "fnn.csv") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound speed profile inversion toolkit"};
  app.require_subcommand(1);
  Common common;

  auto* gen = app.add_subcommand("gen-world", "generate the synthetic historical profiles and a held-out task");
  addCommon(gen, common);

  std::string input, refs, profile, checkpoint, observation, report, task;
  std::optional<double> lon, lat;
  std::optional<int> day;
  std::optional<std::size_t> reps;

  auto* ext = app.add_subcommand("extend", "extend a partial-depth profile to full depth");
  addCommon(ext, common);
  ext->add_option("--input", input, "partial-depth profile CSV")->required();
  ext->add_option("--references", refs, "directory of full-depth profile CSVs")->required();

  auto* sim = app.add_subcommand("simulate", "simulate travel-time observations for a profile");
  addCommon(sim, common);
  sim->add_option("--profile", profile, "profile CSV")->required();

  auto* pre = app.add_subcommand("pretrain", "pretrain the multi-task learner and fit the task learner");
  addCommon(pre, common);

  auto* inv = app.add_subcommand("invert", "invert an observation with a checkpoint");
  addCommon(inv, common);
  inv->add_option("--checkpoint", checkpoint, "checkpoint JSON")->required();
  inv->add_option("--observation", observation, "observation CSV")->required();

  auto* bench = app.add_subcommand("benchmark", "run every method over seeded repetitions");
  addCommon(bench, common);
  bench->add_option("--repetitions", reps, "override harness.repetitions");

  auto* plot = app.add_subcommand("plot-data", "write figure series (CSV and SVG) from a benchmark report");
  addCommon(plot, common);
  plot->add_option("--report", report, "report.json from the benchmark subcommand")->required();

  auto* sip = app.add_subcommand("sip", "spatial interpolation baseline");
  addCommon(sip, common);
  sip->add_option("--references", refs, "directory of reference profile CSVs")->required();
  sip->add_option("--task", task, "profile CSV whose location/day is the target");
  sip->add_option("--lon", lon, "target longitude (deg, east positive)");
  sip->add_option("--lat", lat, "target latitude (deg)");
  sip->add_option("--day", day, "target day of year");

  auto* mfp = app.add_subcommand("mfp", "EOF matched-field baseline (particle swarm search)");
  addCommon(mfp, common);
  mfp->add_option("--references", refs, "directory of reference profile CSVs")->required();
  mfp->add_option("--observation", observation, "observation CSV")->required();

  auto* fnn = app.add_subcommand("fnn", "plain feed-forward network baseline");
  addCommon(fnn, common);
  fnn->add_option("--references", refs, "directory of reference profile CSVs")->required();
  fnn->add_option("--observation", observation, "observation CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    if (*gen) return genWorld(common);
    if (*ext) return extend(common, input, refs);
    if (*sim) return simulate(common, profile);
    if (*pre) return pretrainCmd(common);
    if (*inv) return invertCmd(common, checkpoint, observation);
    if (*bench) return benchmarkCmd(common, reps);
    if (*plot) return plotData(common, report);
    if (*sip) return sipCmd(common, refs, taskMetaFrom(task, lon, lat, day));
    if (*mfp) return mfpCmd(common, refs, observation);
    if (*fnn) return fnnCmd(common, refs, observation);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::data);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::failure);
  }
  return static_cast<int>(ExitCode::failure);
}
