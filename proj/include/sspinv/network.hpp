#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sspinv/error.hpp"
#include "sspinv/linalg.hpp"
#include "sspinv/spatiotemporal.hpp"

namespace sspinv {

struct NetworkShape {
  std::size_t inputs = 120;
  std::size_t hidden = 300;
  std::size_t outputs = 50;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

// Weights of the three-layer inverter. The last column of each matrix holds
// the bias.
struct NetworkParams {
  Matrix hidden;  // hidden x (inputs + 1)
  Matrix output;  // outputs x (hidden + 1)

  NetworkShape shape() const { return {hidden.cols() - 1, hidden.rows(), output.rows()}; }
  double l1Norm() const {
    double s = 0.0;
    for (double v : hidden.data()) s += std::abs(v);
    for (double v : output.data()) s += std::abs(v);
    return s;
  }
  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

inline double glorotRange(std::size_t fanIn, std::size_t fanOut) {
  return std::sqrt(6.0 / static_cast<double>(fanIn + fanOut));
}

namespace detail {

inline void fillUniform(Matrix& m, std::size_t weightCols, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-r, r);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < weightCols; ++j) {
      double w = dist(rng);
      while (w <= -r) w = dist(rng);
      m(i, j) = w;
    }
}

}  // namespace detail

// Uniform(-r, r) weights with r = sqrt(6 / (fanIn + fanOut)) per layer, zero biases.
inline NetworkParams initParams(const NetworkShape& shape, std::uint64_t seed) {
  if (shape.inputs == 0 || shape.hidden == 0 || shape.outputs == 0) throw ConfigError("network sizes must be >= 1");
  std::mt19937_64 rng(seed);
  NetworkParams p{Matrix(shape.hidden, shape.inputs + 1), Matrix(shape.outputs, shape.hidden + 1)};
  detail::fillUniform(p.hidden, shape.inputs, glorotRange(shape.inputs, shape.hidden), rng);
  detail::fillUniform(p.output, shape.hidden, glorotRange(shape.hidden, shape.outputs), rng);
  return p;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ForwardPass {
  std::vector<double> hidden;  // sigmoid activations
  std::vector<double> output;  // linear
};

inline ForwardPass forward(const NetworkParams& p, std::span<const double> input) {
  const std::size_t nIn = p.hidden.cols() - 1;
  const std::size_t nHid = p.hidden.rows();
  if (input.size() != nIn) throw ShapeError("input length " + std::to_string(input.size()) + " != " + std::to_string(nIn));
  if (p.output.cols() != nHid + 1) throw ShapeError("output layer does not match hidden layer");
  ForwardPass f;
  f.hidden.resize(nHid);
  for (std::size_t j = 0; j < nHid; ++j) {
    const auto row = p.hidden.row(j);
    double a = row[nIn];
    for (std::size_t i = 0; i < nIn; ++i) a += row[i] * input[i];
    f.hidden[j] = sigmoid(a);
  }
  f.output.resize(p.output.rows());
  for (std::size_t d = 0; d < p.output.rows(); ++d) {
    const auto row = p.output.row(d);
    double a = row[nHid];
    for (std::size_t j = 0; j < nHid; ++j) a += row[j] * f.hidden[j];
    f.output[d] = a;
  }
  return f;
}

struct TrainingSample {
  std::vector<double> input;  // standardized travel times
  std::vector<double> label;  // standardized layer speeds
  TaskMeta meta;
  std::string id;
};

// 1/2 sum_d (s_d - s^_d)^2
inline double squaredErrorCost(std::span<const double> label, std::span<const double> predicted) {
  if (label.size() != predicted.size()) throw ShapeError("label length != output length");
  double s = 0.0;
  for (std::size_t d = 0; d < label.size(); ++d) {
    const double e = label[d] - predicted[d];
    s += e * e;
  }
  return 0.5 * s;
}

inline double taskCost(const NetworkParams& p, const TrainingSample& sample) {
  return squaredErrorCost(sample.label, forward(p, sample.input).output);
}

// Multi-task cost over one cluster's shots. With perShotRegularizer the
// L1 term sits inside the shot sum and is counted once per shot.
inline double pretrainCost(const NetworkParams& p, std::span<const TrainingSample> shots, double mu,
                           bool perShotRegularizer = true) {
  if (shots.empty()) throw DataError("pretraining cost needs at least one shot");
  double data = 0.0;
  for (const auto& s : shots) data += taskCost(p, s);
  const double reps = perShotRegularizer ? static_cast<double>(shots.size()) : 1.0;
  return data + reps * mu * p.l1Norm();
}

struct Gradient {
  Matrix hidden;
  Matrix output;

  static Gradient zerosLike(const NetworkParams& p) {
    return {Matrix(p.hidden.rows(), p.hidden.cols()), Matrix(p.output.rows(), p.output.cols())};
  }
};

// Adds the gradient of 1/2 ||label - f(input)||^2 to `g`; returns the cost.
inline double accumulateSquaredErrorGradient(const NetworkParams& p, const TrainingSample& sample, Gradient& g) {
  const auto f = forward(p, sample.input);
  if (sample.label.size() != f.output.size()) throw ShapeError("label length != output length");
  const std::size_t nIn = sample.input.size();
  const std::size_t nHid = f.hidden.size();
  std::vector<double> err(f.output.size());
  double cost = 0.0;
  for (std::size_t d = 0; d < err.size(); ++d) {
    err[d] = f.output[d] - sample.label[d];
    cost += err[d] * err[d];
  }
  std::vector<double> delta(nHid, 0.0);
  for (std::size_t d = 0; d < err.size(); ++d) {
    auto grow = g.output.row(d);
    const auto wrow = p.output.row(d);
    for (std::size_t j = 0; j < nHid; ++j) {
      grow[j] += err[d] * f.hidden[j];
      delta[j] += wrow[j] * err[d];
    }
    grow[nHid] += err[d];
  }
  for (std::size_t j = 0; j < nHid; ++j) {
    const double dj = delta[j] * f.hidden[j] * (1.0 - f.hidden[j]);
    auto grow = g.hidden.row(j);
    for (std::size_t i = 0; i < nIn; ++i) grow[i] += dj * sample.input[i];
    grow[nIn] += dj;
  }
  return 0.5 * cost;
}

inline Gradient taskGradient(const NetworkParams& p, const TrainingSample& sample) {
  auto g = Gradient::zerosLike(p);
  accumulateSquaredErrorGradient(p, sample, g);
  return g;
}

// Gradient of pretrainCost. The L1 subgradient at exactly zero is zero.
inline Gradient pretrainGradient(const NetworkParams& p, std::span<const TrainingSample> shots, double mu,
                                 bool perShotRegularizer = true) {
  if (shots.empty()) throw DataError("pretraining gradient needs at least one shot");
  auto g = Gradient::zerosLike(p);
  for (const auto& s : shots) accumulateSquaredErrorGradient(p, s, g);
  const double weight = mu * (perShotRegularizer ? static_cast<double>(shots.size()) : 1.0);
  if (weight != 0.0) {
    auto addSign = [weight](std::span<double> grad, std::span<const double> w) {
      for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] != 0.0) grad[i] += weight * (w[i] > 0.0 ? 1.0 : -1.0);
    };
    addSign(g.hidden.data(), p.hidden.data());
    addSign(g.output.data(), p.output.data());
  }
  return g;
}

inline void applyStep(Matrix& w, const Matrix& grad, double rate) {
  auto wd = w.data();
  const auto gd = grad.data();
  for (std::size_t i = 0; i < wd.size(); ++i) wd[i] -= rate * gd[i];
}

// z-score statistics: per-component for inputs, one (mean, std) pair for
// label speeds.
struct Standardizer {
  std::vector<double> inputMean;
  std::vector<double> inputStd;
  double labelMean = 0.0;
  double labelStd = 1.0;

  static Standardizer identity(std::size_t inputs) {
    return {std::vector<double>(inputs, 0.0), std::vector<double>(inputs, 1.0), 0.0, 1.0};
  }

  static Standardizer fit(std::span<const std::vector<double>> inputs, std::span<const std::vector<double>> labels) {
    if (inputs.empty() || labels.empty()) throw DataError("cannot fit a standardizer on an empty set");
    Standardizer s;
    const std::size_t n = inputs.front().size();
    s.inputMean.assign(n, 0.0);
    s.inputStd.assign(n, 0.0);
    for (const auto& x : inputs) {
      if (x.size() != n) throw ShapeError("inconsistent input lengths");
      for (std::size_t i = 0; i < n; ++i) s.inputMean[i] += x[i];
    }
    for (double& m : s.inputMean) m /= static_cast<double>(inputs.size());
    for (const auto& x : inputs)
      for (std::size_t i = 0; i < n; ++i) s.inputStd[i] += (x[i] - s.inputMean[i]) * (x[i] - s.inputMean[i]);
    for (double& v : s.inputStd) {
      v = std::sqrt(v / static_cast<double>(inputs.size()));
      if (!(v > 0.0)) v = 1.0;
    }
    double sum = 0.0, count = 0.0;
    for (const auto& l : labels)
      for (double v : l) {
        sum += v;
        count += 1.0;
      }
    s.labelMean = sum / count;
    double var = 0.0;
    for (const auto& l : labels)
      for (double v : l) var += (v - s.labelMean) * (v - s.labelMean);
    s.labelStd = std::sqrt(var / count);
    if (!(s.labelStd > 0.0)) s.labelStd = 1.0;
    return s;
  }

  std::vector<double> input(std::span<const double> raw) const {
    if (raw.size() != inputMean.size()) throw ShapeError("observation length != standardizer length");
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - inputMean[i]) / inputStd[i];
    return out;
  }
  std::vector<double> label(std::span<const double> speeds) const {
    std::vector<double> out(speeds.size());
    for (std::size_t i = 0; i < speeds.size(); ++i) out[i] = (speeds[i] - labelMean) / labelStd;
    return out;
  }
  std::vector<double> speeds(std::span<const double> standardized) const {
    std::vector<double> out(standardized.size());
    for (std::size_t i = 0; i < standardized.size(); ++i) out[i] = standardized[i] * labelStd + labelMean;
    return out;
  }
};

}  // namespace sspinv
