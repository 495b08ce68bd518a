#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sspinv/mtl.hpp"

using namespace sspinv;

namespace {

const NetworkShape kSmall{4, 6, 3};

std::vector<TrainingSample> randomSamples(std::size_t n, std::uint64_t seed, const NetworkShape& s = kSmall) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<TrainingSample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < s.inputs; ++i) out[k].input.push_back(g(rng));
    for (std::size_t i = 0; i < s.outputs; ++i) out[k].label.push_back(g(rng));
    out[k].meta = {{static_cast<double>(k), 0.0}, static_cast<int>(k % 365) + 1};
  }
  return out;
}

MtlConfig smallConfig() {
  MtlConfig c;
  c.network = kSmall;
  c.clusterCount = 1;
  c.clustersPerEpoch = 1;
  c.shotsPerCluster = 4;
  c.pretrainEpochs = 1;
  c.baseRate = 0.05;
  c.l1Coefficient = 0.0;
  return c;
}

double maxDiff(const Matrix& a, const Matrix& b) { return maxAbsDifference(a, b); }

}  // namespace

// With a single cluster and every shot drawn, one epoch is a plain gradient
// step of size xi on the multi-task cost.
TEST(Pretrain, SingleClusterIsGradientDescent) {
  auto cfg = smallConfig();
  const std::vector<std::vector<TrainingSample>> clusters{randomSamples(4, 1)};
  auto model = initMultiTaskModel(cfg, 1);
  const NetworkParams start = model.paramsFor(0);
  pretrainEpoch(model, clusters, cfg, 0);
  const auto g = pretrainGradient(start, clusters[0], cfg.l1Coefficient);
  auto want = start;
  applyStep(want.hidden, g.hidden, cfg.baseRate);
  applyStep(want.output, g.output, cfg.baseRate);
  EXPECT_LT(maxDiff(model.sharedHidden, want.hidden), 1e-14);
  EXPECT_LT(maxDiff(model.clusterOutputs[0], want.output), 1e-14);
  EXPECT_NEAR(model.lossHistory.at(0), pretrainCost(start, clusters[0], 0.0), 1e-12);
}

TEST(Pretrain, SharedLayerTakesSummedStepsPrivateLayersScaleByN) {
  auto cfg = smallConfig();
  cfg.clusterCount = 2;
  cfg.clustersPerEpoch = 2;
  const std::vector<std::vector<TrainingSample>> clusters{randomSamples(4, 2), randomSamples(4, 3)};
  auto model = initMultiTaskModel(cfg, 2);
  const auto p0 = model.paramsFor(0), p1 = model.paramsFor(1);
  pretrainEpoch(model, clusters, cfg, 0);
  const auto g0 = pretrainGradient(p0, clusters[0], 0.0);
  const auto g1 = pretrainGradient(p1, clusters[1], 0.0);
  auto wantHidden = p0.hidden;
  applyStep(wantHidden, g0.hidden, cfg.baseRate / 2);
  applyStep(wantHidden, g1.hidden, cfg.baseRate / 2);
  auto wantOut0 = p0.output;
  applyStep(wantOut0, g0.output, cfg.baseRate / 2);
  EXPECT_LT(maxDiff(model.sharedHidden, wantHidden), 1e-14);
  EXPECT_LT(maxDiff(model.clusterOutputs[0], wantOut0), 1e-14);
}

TEST(Pretrain, LossFallsWithAReasonableRate) {
  auto cfg = smallConfig();
  cfg.pretrainEpochs = 200;
  cfg.baseRate = 0.02;
  const std::vector<std::vector<TrainingSample>> clusters{randomSamples(4, 4)};
  const auto m = pretrain(clusters, cfg);
  ASSERT_EQ(m.lossHistory.size(), 200u);
  EXPECT_LT(m.lossHistory.back(), 0.5 * m.lossHistory.front());
}

TEST(Pretrain, DeterministicForASeed) {
  auto cfg = smallConfig();
  cfg.clusterCount = 3;
  cfg.clustersPerEpoch = 2;
  cfg.pretrainEpochs = 5;
  const std::vector<std::vector<TrainingSample>> clusters{randomSamples(6, 5), randomSamples(6, 6),
                                                           randomSamples(6, 7)};
  const auto a = pretrain(clusters, cfg), b = pretrain(clusters, cfg);
  EXPECT_EQ(a.sharedHidden, b.sharedHidden);
  EXPECT_EQ(a.lossHistory, b.lossHistory);
}

TEST(TaskRates, InverseDistanceNormalized) {
  const std::vector<double> phi{1.0, 3.0};
  const auto eta = inverseDistanceRates(phi, 0.01);
  EXPECT_NEAR(eta[0], 0.0075, 1e-15);
  EXPECT_NEAR(eta[1], 0.0025, 1e-15);
  const auto eq = inverseDistanceRates(std::vector<double>(4, 2.5), 0.01);
  for (double e : eq) EXPECT_EQ(e, 0.01 / 4.0);
  const auto zero = inverseDistanceRates(std::vector<double>{0.0, 2.0, 0.0}, 0.01);
  EXPECT_DOUBLE_EQ(zero[0], 0.005);
  EXPECT_DOUBLE_EQ(zero[1], 0.0);
  EXPECT_DOUBLE_EQ(zero[2], 0.005);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 50.0);
  std::vector<double> many(13);
  for (double& v : many) v = u(rng);
  double s = 0.0;
  for (double e : inverseDistanceRates(many, 0.01)) s += e;
  EXPECT_NEAR(s, 0.01, 1e-15);
}

TEST(TaskRates, FromMetadata) {
  const TaskMeta task{{0.0, 0.0}, 100};
  const std::vector<TaskMeta> refs{{{1.0, 0.0}, 100}, {{0.0, 0.0}, 110}};
  // lambda 0.5: phi = 0.5 and 5
  const auto eta = taskLearningRates(task, refs, 0.011, 0.5);
  EXPECT_NEAR(eta[0], 0.011 * 2.0 / 2.2, 1e-15);
  EXPECT_NEAR(eta[1], 0.011 * 0.2 / 2.2, 1e-15);
}

TEST(TrainTaskLearner, ZeroEpochsReturnsInit) {
  const auto s = randomSamples(3, 8);
  const auto init = initParams(kSmall, 8);
  const std::vector<double> rates(3, 0.1);
  const auto r = trainTaskLearner(init, s, rates, 0, 2, 1);
  EXPECT_EQ(r.params, init);
  EXPECT_TRUE(r.lossHistory.empty());
}

TEST(TrainTaskLearner, FixedPointStaysPut) {
  // labels equal to the network's own output give a zero gradient
  auto s = randomSamples(3, 9);
  const auto init = initParams(kSmall, 9);
  for (auto& x : s) x.label = forward(init, x.input).output;
  const std::vector<double> rates(3, 0.5);
  const auto r = trainTaskLearner(init, s, rates, 5, 3, 2);
  EXPECT_EQ(r.params, init);
  for (double l : r.lossHistory) EXPECT_DOUBLE_EQ(l, 0.0);
}

TEST(TrainTaskLearner, SingleSampleStepDescends) {
  const auto s = randomSamples(1, 10);
  const auto init = initParams(kSmall, 10);
  const std::vector<double> rates{0.01};
  const auto r = trainTaskLearner(init, s, rates, 1, 1, 3);
  EXPECT_LT(taskCost(r.params, s[0]), taskCost(init, s[0]));
}

TEST(TrainTaskLearner, MemorizesASmallSet) {
  const auto s = randomSamples(3, 11);
  const std::vector<double> rates(3, 0.05);
  const auto r = trainTaskLearner(initParams(kSmall, 11), s, rates, 4000, 3, 4);
  double se = 0.0, n = 0.0;
  for (const auto& x : s) {
    const auto y = forward(r.params, x.input).output;
    for (std::size_t d = 0; d < y.size(); ++d) {
      se += (y[d] - x.label[d]) * (y[d] - x.label[d]);
      n += 1.0;
    }
  }
  EXPECT_LT(std::sqrt(se / n), 0.05);
}

TEST(FinetuneTask, KeepsSharedLayerShapeAndValidates) {
  MtlConfig cfg = smallConfig();
  cfg.taskEpochs = 3;
  cfg.taskShotsPerEpoch = 2;
  const auto s = randomSamples(5, 12);
  const Matrix shared = initParams(kSmall, 99).hidden;
  const auto r = finetuneTask(shared, s, {{0.5, 0.0}, 3}, cfg, 7);
  EXPECT_EQ(r.lossHistory.size(), 3u);
  EXPECT_THROW(finetuneTask(Matrix(2, 2), s, {}, cfg, 7), ShapeError);
  EXPECT_THROW(finetuneTask(shared, {}, {}, cfg, 7), DataError);
}

TEST(Invert, ZeroNetworkGivesLabelMean) {
  NetworkParams zero{Matrix(6, 5), Matrix(3, 7)};
  Standardizer st = Standardizer::identity(4);
  st.labelMean = 1500.0;
  st.labelStd = 7.0;
  TravelTimeObservation obs{{1.0, 2.0, 3.0, 4.0}, 2, 2};
  const std::vector<double> grid{0.0, 10.0, 20.0};
  const auto p = invert(zero, obs, st, grid);
  for (double v : p.speeds()) EXPECT_DOUBLE_EQ(v, 1500.0);
  EXPECT_THROW(invert(zero, obs, st, std::vector<double>{0.0, 10.0}), ShapeError);
}
