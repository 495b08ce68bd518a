#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sspinv/benchmark.hpp"
#include "sspinv/error.hpp"
#include "sspinv/extension.hpp"

namespace sspinv {

// Everything the CLI can configure. Defaults are the method's reference
// settings where it has one.
struct ToolkitConfig {
  BenchmarkConfig benchmark{};
  TwoStepOptions extension{};
};

namespace detail {

// Copies j[key] into `out` when present; wrong types become ConfigError.
template <class T>
void readKey(const nlohmann::json& section, const char* sectionName, const char* key, T& out) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(sectionName) + "." + key + ": " + e.what());
  }
}

inline void rejectUnknown(const nlohmann::json& section, const char* sectionName, const std::set<std::string>& known) {
  if (!section.is_object()) throw ConfigError(std::string("section '") + sectionName + "' must be an object");
  for (const auto& [k, v] : section.items())
    if (!known.count(k)) throw ConfigError(std::string("unknown key ") + sectionName + "." + k);
}

inline const char* pairingName(ModePairing p) { return p == ModePairing::rank ? "rank" : "transfer"; }

inline ModePairing pairingFromName(const std::string& s) {
  if (s == "rank") return ModePairing::rank;
  if (s == "transfer") return ModePairing::transfer;
  throw ConfigError("extension.pairing must be 'transfer' or 'rank'");
}

}  // namespace detail

inline nlohmann::json configToJson(const ToolkitConfig& c) {
  const auto& b = c.benchmark;
  const auto& w = b.world;
  const auto& m = b.mtl;
  nlohmann::json j;
  j["world"] = {{"clusterCount", w.clusterCount},
                {"profilesPerCluster", w.profilesPerCluster},
                {"maxDepth", w.maxDepth},
                {"sampleSpacing", w.sampleSpacing},
                {"seed", w.seed},
                {"axisSpeedMin", w.axisSpeedMin},
                {"axisSpeedMax", w.axisSpeedMax},
                {"axisDepthMin", w.axisDepthMin},
                {"axisDepthMax", w.axisDepthMax},
                {"scaleDepthMin", w.scaleDepthMin},
                {"scaleDepthMax", w.scaleDepthMax},
                {"epsilonMin", w.epsilonMin},
                {"epsilonMax", w.epsilonMax},
                {"axisSpeedJitter", w.axisSpeedJitter},
                {"axisDepthJitter", w.axisDepthJitter},
                {"modeDecayDepth", w.modeDecayDepth},
                {"seasonalAmplitude", {w.seasonalAmplitude[0], w.seasonalAmplitude[1]}},
                {"spatialGradient", {w.spatialGradient[0], w.spatialGradient[1]}},
                {"modeNoise", {w.modeNoise[0], w.modeNoise[1]}},
                {"regionSpreadDegrees", w.regionSpreadDegrees},
                {"seasonalHalfWindowDays", w.seasonalHalfWindowDays},
                {"taskCluster", w.taskCluster}};
  j["scenario"] = {{"receiverCount", b.scenario.receiverCount}, {"anchorRadius", b.scenario.anchorRadius},
                   {"receiverDepth", b.scenario.receiverDepth}, {"pingCount", b.scenario.pingCount},
                   {"pingRadius", b.scenario.pingRadius},       {"sourceDepth", b.scenario.sourceDepth},
                   {"noiseSigma", b.scenario.noiseSigma},       {"simulationLayers", b.scenario.simulationLayers}};
  j["selection"] = {{"psi", b.selection.psi}, {"lambdaTk", b.selection.lambdaTk}};
  j["mtl"] = {{"inputNeurons", m.network.inputs},
              {"hiddenNeurons", m.network.hidden},
              {"outputNeurons", m.network.outputs},
              {"clusterCount", m.clusterCount},
              {"clustersPerEpoch", m.clustersPerEpoch},
              {"shotsPerCluster", m.shotsPerCluster},
              {"pretrainEpochs", m.pretrainEpochs},
              {"taskEpochs", m.taskEpochs},
              {"taskShotsPerEpoch", m.taskShotsPerEpoch},
              {"baseRate", m.baseRate},
              {"taskBaseRate", m.taskBaseRate},
              {"l1Coefficient", m.l1Coefficient},
              {"lambdaRate", m.lambdaRate},
              {"perShotRegularizer", m.perShotRegularizer},
              {"seed", m.seed}};
  j["baselines"] = {{"eofOrder", b.eofOrder},
                    {"fnnRate", b.fnnRate},
                    {"psoParticles", b.pso.particles},
                    {"psoIterations", b.pso.iterations},
                    {"psoInertia", b.pso.inertia},
                    {"psoCognitive", b.pso.cognitive},
                    {"psoSocial", b.pso.social},
                    {"psoBoundScale", b.pso.boundScale},
                    {"psoSeed", b.pso.seed}};
  j["extension"] = {{"partialOrder", c.extension.eof.partialOrder},
                    {"fullOrder", c.extension.eof.fullOrder},
                    {"fullResolution", c.extension.eof.fullResolution},
                    {"layerCount", c.extension.eof.layerCount},
                    {"pairing", detail::pairingName(c.extension.eof.pairing)},
                    {"crossFadeMeters", c.extension.eof.crossFadeMeters},
                    {"eofDepth", c.extension.eofDepth},
                    {"finalDepth", c.extension.finalDepth},
                    {"gradientWindow", c.extension.gradientWindow}};
  std::vector<std::string> methods;
  for (Method mm : b.methods) methods.emplace_back(methodName(mm));
  j["harness"] = {{"methods", methods},
                  {"repetitions", b.repetitions},
                  {"masterSeed", b.masterSeed},
                  {"layerCount", b.layerCount},
                  {"maxTaskReferences", b.maxTaskReferences},
                  {"clusterSeed", b.clusterSeed},
                  {"timingCalls", b.timingCalls},
                  {"mfpTimingCalls", b.mfpTimingCalls},
                  {"workers", b.workers}};
  return j;
}

inline void validateConfig(const ToolkitConfig& c) {
  const auto& b = c.benchmark;
  b.world.validate();
  b.mtl.validate();
  b.pso.validate();
  if (b.scenario.receiverCount < 1 || b.scenario.pingCount < 1) throw ConfigError("scenario counts must be >= 1");
  if (!(b.scenario.receiverDepth > b.scenario.sourceDepth)) throw ConfigError("receivers must sit below the source");
  if (!(b.scenario.noiseSigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (b.scenario.simulationLayers < 2) throw ConfigError("simulation needs at least 2 layers");
  b.selection.validate();
  if (b.eofOrder < 1) throw ConfigError("EOF order must be >= 1");
  if (b.maxTaskReferences < 1) throw ConfigError("need at least one task reference");
  if (b.methods.empty()) throw ConfigError("no methods selected");
  if (b.mtl.clusterCount > b.world.clusterCount * b.world.profilesPerCluster)
    throw ConfigError("more clusters than profiles");
  if (c.extension.eof.partialOrder != c.extension.eof.fullOrder)
    throw ConfigError("extension orders must match");
  if (!(c.extension.finalDepth >= c.extension.eofDepth)) throw ConfigError("finalDepth must be >= eofDepth");
}

inline ToolkitConfig configFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::rejectUnknown(j, "<root>", {"world", "scenario", "selection", "mtl", "baselines", "extension", "harness"});
  ToolkitConfig c;
  auto& b = c.benchmark;
  using detail::readKey;
  if (j.contains("world")) {
    const auto& s = j["world"];
    detail::rejectUnknown(s, "world",
                          {"clusterCount", "profilesPerCluster", "maxDepth", "sampleSpacing", "seed", "axisSpeedMin",
                           "axisSpeedMax", "axisDepthMin", "axisDepthMax", "scaleDepthMin", "scaleDepthMax",
                           "epsilonMin", "epsilonMax", "axisSpeedJitter", "axisDepthJitter", "modeDecayDepth",
                           "seasonalAmplitude", "spatialGradient", "modeNoise", "regionSpreadDegrees",
                           "seasonalHalfWindowDays", "taskCluster"});
    auto& w = b.world;
    readKey(s, "world", "clusterCount", w.clusterCount);
    readKey(s, "world", "profilesPerCluster", w.profilesPerCluster);
    readKey(s, "world", "maxDepth", w.maxDepth);
    readKey(s, "world", "sampleSpacing", w.sampleSpacing);
    readKey(s, "world", "seed", w.seed);
    readKey(s, "world", "axisSpeedMin", w.axisSpeedMin);
    readKey(s, "world", "axisSpeedMax", w.axisSpeedMax);
    readKey(s, "world", "axisDepthMin", w.axisDepthMin);
    readKey(s, "world", "axisDepthMax", w.axisDepthMax);
    readKey(s, "world", "scaleDepthMin", w.scaleDepthMin);
    readKey(s, "world", "scaleDepthMax", w.scaleDepthMax);
    readKey(s, "world", "epsilonMin", w.epsilonMin);
    readKey(s, "world", "epsilonMax", w.epsilonMax);
    readKey(s, "world", "axisSpeedJitter", w.axisSpeedJitter);
    readKey(s, "world", "axisDepthJitter", w.axisDepthJitter);
    readKey(s, "world", "modeDecayDepth", w.modeDecayDepth);
    for (const char* key : {"seasonalAmplitude", "spatialGradient", "modeNoise"}) {
      if (!s.contains(key)) continue;
      std::vector<double> v;
      readKey(s, "world", key, v);
      if (v.size() != 2) throw ConfigError(std::string("world.") + key + " needs two values");
      double* dst = std::string(key) == "seasonalAmplitude" ? w.seasonalAmplitude
                    : std::string(key) == "spatialGradient" ? w.spatialGradient
                                                            : w.modeNoise;
      dst[0] = v[0];
      dst[1] = v[1];
    }
    readKey(s, "world", "regionSpreadDegrees", w.regionSpreadDegrees);
    readKey(s, "world", "seasonalHalfWindowDays", w.seasonalHalfWindowDays);
    readKey(s, "world", "taskCluster", w.taskCluster);
  }
  if (j.contains("scenario")) {
    const auto& s = j["scenario"];
    detail::rejectUnknown(s, "scenario",
                          {"receiverCount", "anchorRadius", "receiverDepth", "pingCount", "pingRadius", "sourceDepth",
                           "noiseSigma", "simulationLayers"});
    auto& sc = b.scenario;
    readKey(s, "scenario", "receiverCount", sc.receiverCount);
    readKey(s, "scenario", "anchorRadius", sc.anchorRadius);
    readKey(s, "scenario", "receiverDepth", sc.receiverDepth);
    readKey(s, "scenario", "pingCount", sc.pingCount);
    readKey(s, "scenario", "pingRadius", sc.pingRadius);
    readKey(s, "scenario", "sourceDepth", sc.sourceDepth);
    readKey(s, "scenario", "noiseSigma", sc.noiseSigma);
    readKey(s, "scenario", "simulationLayers", sc.simulationLayers);
  }
  if (j.contains("selection")) {
    const auto& s = j["selection"];
    detail::rejectUnknown(s, "selection", {"psi", "lambdaTk"});
    readKey(s, "selection", "psi", b.selection.psi);
    readKey(s, "selection", "lambdaTk", b.selection.lambdaTk);
  }
  if (j.contains("mtl")) {
    const auto& s = j["mtl"];
    detail::rejectUnknown(s, "mtl",
                          {"inputNeurons", "hiddenNeurons", "outputNeurons", "clusterCount", "clustersPerEpoch",
                           "shotsPerCluster", "pretrainEpochs", "taskEpochs", "taskShotsPerEpoch", "baseRate",
                           "taskBaseRate", "l1Coefficient", "lambdaRate", "perShotRegularizer", "seed"});
    auto& m = b.mtl;
    readKey(s, "mtl", "inputNeurons", m.network.inputs);
    readKey(s, "mtl", "hiddenNeurons", m.network.hidden);
    readKey(s, "mtl", "outputNeurons", m.network.outputs);
    readKey(s, "mtl", "clusterCount", m.clusterCount);
    readKey(s, "mtl", "clustersPerEpoch", m.clustersPerEpoch);
    readKey(s, "mtl", "shotsPerCluster", m.shotsPerCluster);
    readKey(s, "mtl", "pretrainEpochs", m.pretrainEpochs);
    readKey(s, "mtl", "taskEpochs", m.taskEpochs);
    readKey(s, "mtl", "taskShotsPerEpoch", m.taskShotsPerEpoch);
    readKey(s, "mtl", "baseRate", m.baseRate);
    readKey(s, "mtl", "taskBaseRate", m.taskBaseRate);
    readKey(s, "mtl", "l1Coefficient", m.l1Coefficient);
    readKey(s, "mtl", "lambdaRate", m.lambdaRate);
    readKey(s, "mtl", "perShotRegularizer", m.perShotRegularizer);
    readKey(s, "mtl", "seed", m.seed);
  }
  if (j.contains("baselines")) {
    const auto& s = j["baselines"];
    detail::rejectUnknown(s, "baselines",
                          {"eofOrder", "fnnRate", "psoParticles", "psoIterations", "psoInertia", "psoCognitive",
                           "psoSocial", "psoBoundScale", "psoSeed"});
    readKey(s, "baselines", "eofOrder", b.eofOrder);
    readKey(s, "baselines", "fnnRate", b.fnnRate);
    readKey(s, "baselines", "psoParticles", b.pso.particles);
    readKey(s, "baselines", "psoIterations", b.pso.iterations);
    readKey(s, "baselines", "psoInertia", b.pso.inertia);
    readKey(s, "baselines", "psoCognitive", b.pso.cognitive);
    readKey(s, "baselines", "psoSocial", b.pso.social);
    readKey(s, "baselines", "psoBoundScale", b.pso.boundScale);
    readKey(s, "baselines", "psoSeed", b.pso.seed);
  }
  if (j.contains("extension")) {
    const auto& s = j["extension"];
    detail::rejectUnknown(s, "extension",
                          {"partialOrder", "fullOrder", "fullResolution", "layerCount", "pairing", "crossFadeMeters",
                           "eofDepth", "finalDepth", "gradientWindow"});
    auto& e = c.extension;
    readKey(s, "extension", "partialOrder", e.eof.partialOrder);
    readKey(s, "extension", "fullOrder", e.eof.fullOrder);
    readKey(s, "extension", "fullResolution", e.eof.fullResolution);
    readKey(s, "extension", "layerCount", e.eof.layerCount);
    std::string pairing = detail::pairingName(e.eof.pairing);
    readKey(s, "extension", "pairing", pairing);
    e.eof.pairing = detail::pairingFromName(pairing);
    readKey(s, "extension", "crossFadeMeters", e.eof.crossFadeMeters);
    readKey(s, "extension", "eofDepth", e.eofDepth);
    readKey(s, "extension", "finalDepth", e.finalDepth);
    readKey(s, "extension", "gradientWindow", e.gradientWindow);
  }
  if (j.contains("harness")) {
    const auto& s = j["harness"];
    detail::rejectUnknown(s, "harness",
                          {"methods", "repetitions", "masterSeed", "layerCount", "maxTaskReferences", "clusterSeed",
                           "timingCalls", "mfpTimingCalls", "workers"});
    if (s.contains("methods")) {
      std::vector<std::string> names;
      readKey(s, "harness", "methods", names);
      b.methods.clear();
      for (const auto& n : names) b.methods.push_back(methodFromName(n));
    }
    readKey(s, "harness", "repetitions", b.repetitions);
    readKey(s, "harness", "masterSeed", b.masterSeed);
    readKey(s, "harness", "layerCount", b.layerCount);
    readKey(s, "harness", "maxTaskReferences", b.maxTaskReferences);
    readKey(s, "harness", "clusterSeed", b.clusterSeed);
    readKey(s, "harness", "timingCalls", b.timingCalls);
    readKey(s, "harness", "mfpTimingCalls", b.mfpTimingCalls);
    readKey(s, "harness", "workers", b.workers);
  }
  validateConfig(c);
  return c;
}

inline ToolkitConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return configFromJson(j);
}

}  // namespace sspinv
