#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sspinv/network.hpp"

using namespace sspinv;

namespace {

// Straight loops over the weight matrices, written independently of forward().
std::vector<double> oracleForward(const NetworkParams& p, const std::vector<double>& x) {
  const std::size_t nIn = x.size(), nHid = p.hidden.rows();
  std::vector<double> h(nHid);
  for (std::size_t j = 0; j < nHid; ++j) {
    long double a = p.hidden(j, nIn);
    for (std::size_t i = 0; i < nIn; ++i) a += static_cast<long double>(p.hidden(j, i)) * x[i];
    h[j] = static_cast<double>(1.0L / (1.0L + std::exp(-a)));
  }
  std::vector<double> y(p.output.rows());
  for (std::size_t d = 0; d < y.size(); ++d) {
    long double a = p.output(d, nHid);
    for (std::size_t j = 0; j < nHid; ++j) a += static_cast<long double>(p.output(d, j)) * h[j];
    y[d] = static_cast<double>(a);
  }
  return y;
}

TrainingSample randomSample(std::mt19937_64& rng, const NetworkShape& s) {
  std::normal_distribution<double> g(0.0, 1.0);
  TrainingSample t;
  for (std::size_t i = 0; i < s.inputs; ++i) t.input.push_back(g(rng));
  for (std::size_t i = 0; i < s.outputs; ++i) t.label.push_back(g(rng));
  return t;
}

}  // namespace

TEST(InitParams, GlorotBoundsAndZeroBias) {
  const NetworkShape shape;
  const auto p = initParams(shape, 42);
  EXPECT_DOUBLE_EQ(glorotRange(120, 300), std::sqrt(6.0 / 420.0));
  const double rh = std::sqrt(6.0 / 420.0), ro = std::sqrt(6.0 / 350.0);
  ASSERT_EQ(p.hidden.rows(), 300u);
  ASSERT_EQ(p.hidden.cols(), 121u);
  ASSERT_EQ(p.output.rows(), 50u);
  ASSERT_EQ(p.output.cols(), 301u);
  double maxH = 0.0;
  for (std::size_t j = 0; j < 300; ++j) {
    for (std::size_t i = 0; i < 120; ++i) {
      EXPECT_LT(std::abs(p.hidden(j, i)), rh);
      maxH = std::max(maxH, std::abs(p.hidden(j, i)));
    }
    EXPECT_EQ(p.hidden(j, 120), 0.0);
  }
  EXPECT_GT(maxH, 0.9 * rh);
  for (std::size_t d = 0; d < 50; ++d) {
    for (std::size_t j = 0; j < 300; ++j) EXPECT_LT(std::abs(p.output(d, j)), ro);
    EXPECT_EQ(p.output(d, 300), 0.0);
  }
  EXPECT_EQ(p, initParams(shape, 42));
  EXPECT_NE(p, initParams(shape, 43));
  EXPECT_THROW(initParams({0, 3, 3}, 1), ConfigError);
}

TEST(Forward, ZeroWeightsGiveZeroOutputAndHalfActivations) {
  NetworkParams p{Matrix(300, 121), Matrix(50, 301)};
  const auto f = forward(p, std::vector<double>(120, 3.0));
  for (double h : f.hidden) EXPECT_DOUBLE_EQ(h, 0.5);
  for (double y : f.output) EXPECT_DOUBLE_EQ(y, 0.0);
}

TEST(Forward, ZeroInputLeavesOnlyBiases) {
  auto p = initParams({}, 5);
  for (std::size_t j = 0; j < 300; ++j) p.hidden(j, 120) = 0.0;
  const auto f = forward(p, std::vector<double>(120, 0.0));
  for (std::size_t d = 0; d < 50; ++d) {
    double s = p.output(d, 300);
    for (std::size_t j = 0; j < 300; ++j) s += 0.5 * p.output(d, j);
    EXPECT_NEAR(f.output[d], s, 1e-12);
  }
}

TEST(Forward, MatchesIndependentOracle) {
  std::mt19937_64 rng(17);
  auto p = initParams({}, 17);
  std::normal_distribution<double> g(0.0, 0.1);
  for (double& v : p.hidden.data()) v += g(rng);
  for (double& v : p.output.data()) v += g(rng);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = randomSample(rng, {});
    const auto got = forward(p, s.input).output;
    const auto want = oracleForward(p, s.input);
    for (std::size_t d = 0; d < 50; ++d) EXPECT_NEAR(got[d], want[d], 1e-12);
  }
  EXPECT_THROW(forward(p, std::vector<double>(119, 0.0)), ShapeError);
}

TEST(Cost, ClosedForms) {
  EXPECT_DOUBLE_EQ(squaredErrorCost(std::vector<double>(50, 1.0), std::vector<double>(50, 0.0)), 25.0);
  const std::vector<double> a(50, 2.0), b(50, 2.5);
  EXPECT_DOUBLE_EQ(squaredErrorCost(a, b), 0.5 * 50 * 0.25);
  EXPECT_THROW(squaredErrorCost(a, std::vector<double>(49, 0.0)), ShapeError);

  // zero network: every output is 0, so each shot costs 1/2 * 50 * e^2
  NetworkParams zero{Matrix(300, 121), Matrix(50, 301)};
  std::vector<TrainingSample> shots(7);
  for (auto& s : shots) {
    s.input.assign(120, 1.0);
    s.label.assign(50, 0.4);
  }
  EXPECT_NEAR(pretrainCost(zero, shots, 0.3), 7 * 25.0 * 0.16, 1e-12);
  // L1 counted once per shot, or once overall
  auto p = zero;
  p.hidden(0, 0) = 2.0;
  p.output(1, 1) = -1.0;
  const double data = pretrainCost(zero, shots, 0.0);
  (void)data;
  const double withL1 = pretrainCost(p, shots, 0.01);
  const double withoutL1 = pretrainCost(p, shots, 0.0);
  EXPECT_NEAR(withL1 - withoutL1, 7 * 0.01 * 3.0, 1e-12);
  EXPECT_NEAR(pretrainCost(p, shots, 0.01, false) - withoutL1, 0.01 * 3.0, 1e-12);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  const NetworkShape shape{6, 5, 4};
  auto p = initParams(shape, 23);
  std::normal_distribution<double> g(0.0, 0.3);
  for (double& v : p.hidden.data()) v += g(rng);
  for (double& v : p.output.data()) v += g(rng);
  std::vector<TrainingSample> shots{randomSample(rng, shape), randomSample(rng, shape), randomSample(rng, shape)};
  const double mu = 0.05;
  const auto grad = pretrainGradient(p, shots, mu);
  const double h = 1e-6;
  auto check = [&](Matrix NetworkParams::*which, const Matrix& gm) {
    for (std::size_t i = 0; i < gm.data().size(); ++i) {
      auto plus = p, minus = p;
      (plus.*which).data()[i] += h;
      (minus.*which).data()[i] -= h;
      const double fd = (pretrainCost(plus, shots, mu) - pretrainCost(minus, shots, mu)) / (2 * h);
      EXPECT_NEAR(gm.data()[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  };
  check(&NetworkParams::hidden, grad.hidden);
  check(&NetworkParams::output, grad.output);

  const auto single = taskGradient(p, shots[0]);
  for (std::size_t i = 0; i < single.output.data().size(); ++i) {
    auto plus = p, minus = p;
    plus.output.data()[i] += h;
    minus.output.data()[i] -= h;
    EXPECT_NEAR(single.output.data()[i], (taskCost(plus, shots[0]) - taskCost(minus, shots[0])) / (2 * h), 1e-6);
  }
}

TEST(Standardizer, RoundTripsAndFits) {
  const std::vector<std::vector<double>> in{{1.0, 10.0}, {3.0, 10.0}};
  const std::vector<std::vector<double>> lab{{1500.0, 1510.0}};
  const auto s = Standardizer::fit(in, lab);
  EXPECT_DOUBLE_EQ(s.inputMean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.inputStd[0], 1.0);
  EXPECT_DOUBLE_EQ(s.inputStd[1], 1.0);  // constant component keeps unit scale
  EXPECT_DOUBLE_EQ(s.labelMean, 1505.0);
  EXPECT_DOUBLE_EQ(s.labelStd, 5.0);
  const std::vector<double> speeds{1490.0, 1523.5};
  const auto back = s.speeds(s.label(speeds));
  EXPECT_NEAR(back[0], speeds[0], 1e-12);
  EXPECT_NEAR(back[1], speeds[1], 1e-12);
}
