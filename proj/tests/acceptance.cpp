// Runs the ten acceptance checks and prints one PASS/FAIL line each.
// Exit status is non-zero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sspinv.hpp"
#include "support.hpp"

using namespace sspinv;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double fastestSpeed(const LayeredMedium& m) {
  double f = 0.0;
  for (double v : m.speeds()) f = std::max(f, v);
  return f;
}

// Angle safely above the turning limit of a medium launched from node 0.
double randomAngle(const LayeredMedium& m, std::mt19937_64& rng) {
  const double thetaMin = std::acos(std::min(1.0, m.speeds()[0] / fastestSpeed(m)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return thetaMin + 0.02 + (pi / 2 - thetaMin - 0.03) * u(rng);
}

Outcome rayOracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  double worstRange = 0.0, worstTime = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testsupport::randomGradientMedium(rng);
    const double theta = randomAngle(m, rng);
    const std::vector<double> d(m.depths().begin(), m.depths().end()), s(m.speeds().begin(), m.speeds().end());
    const auto last = m.nodeCount() - 1;
    const auto fine = testsupport::snellIntegrate(d, s, theta, 0, last);
    worstRange = std::max(worstRange, std::abs(horizontalRange(m, theta, 0, last) - fine.range));
    worstTime = std::max(worstTime, std::abs(travelTime(m, theta, 0, last) - fine.time));
  }
  double worstClosed = 0.0;
  const LayeredMedium flat({0.0, 700.0, 1500.0, 3000.0}, {1500.0, 1500.0, 1500.0, 1500.0});
  for (int k = 1; k <= 20; ++k) {
    const double theta = (pi / 2) * k / 20.0;
    const double x = 3000.0 / std::tan(theta), t = 3000.0 / (1500.0 * std::sin(theta));
    const double rx = k == 20 ? std::abs(horizontalRange(flat, theta, 0, 3))
                               : std::abs(horizontalRange(flat, theta, 0, 3) - x) / x;
    worstClosed = std::max({worstClosed, rx, std::abs(travelTime(flat, theta, 0, 3) - t) / t});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worstRange < 1e-3 && worstTime < 1e-7 && worstClosed < 1e-9 && secs < 10.0,
          "max range err " + num(worstRange) + " m, max time err " + num(worstTime) + " s, closed-form rel err " +
              num(worstClosed) + ", " + num(secs) + " s"};
}

Outcome angleRoundTrip() {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = testsupport::randomGradientMedium(rng);
    const double theta = randomAngle(m, rng);
    const auto last = m.nodeCount() - 1;
    worst = std::max(worst, std::abs(solveGrazingAngle(m, 0, last, horizontalRange(m, theta, 0, last)) - theta));
  }
  return {worst < 1e-6, "max angle err " + num(worst) + " rad over 100 pairs"};
}

Outcome eofExactness() {
  const auto fam = testsupport::threeModeFamily();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<SoundSpeedProfile> empirical;
  for (int i = 0; i < 20; ++i) empirical.push_back(fam.make({g(rng), g(rng), g(rng)}, "e" + std::to_string(i)));
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto truth = fam.make({g(rng), g(rng), g(rng)});
    const auto partial = interceptProfiles(std::vector<SoundSpeedProfile>{truth}, 2000.0).front();
    const auto out = extendProfile(partial, empirical);
    for (std::size_t i = 0; i < out.size(); ++i)
      worst = std::max(worst, std::abs(out.speeds()[i] - truth.speedAt(out.depths()[i])));
  }
  return {worst < 1e-6, "max error " + num(worst) + " m/s over 20 targets"};
}

// Norm-wise relative difference ||a - b|| / max(||a||, ||b||).
double relativeDifference(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
}

Outcome gradientChecks() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  double worst = 0.0;
  const int trials = 60;
  for (int trial = 0; trial < trials; ++trial) {
    const NetworkShape shape{size(rng), size(rng), size(rng)};
    auto p = initParams(shape, 100 + trial);
    for (double& v : p.hidden.data()) v += 0.3 * g(rng);
    for (double& v : p.output.data()) v += 0.3 * g(rng);
    std::vector<TrainingSample> shots(3);
    for (auto& s : shots) {
      for (std::size_t i = 0; i < shape.inputs; ++i) s.input.push_back(g(rng));
      for (std::size_t i = 0; i < shape.outputs; ++i) s.label.push_back(g(rng));
    }
    const double mu = 0.01;
    const double h = 1e-6;
    // multi-task cost (with L1) and single-sample task cost
    for (int which = 0; which < 2; ++which) {
      auto cost = [&](const NetworkParams& q) {
        return which == 0 ? pretrainCost(q, shots, mu) : taskCost(q, shots[0]);
      };
      const auto grad = which == 0 ? pretrainGradient(p, shots, mu) : taskGradient(p, shots[0]);
      std::vector<double> analytic, numeric;
      for (int layer = 0; layer < 2; ++layer) {
        const Matrix& gm = layer == 0 ? grad.hidden : grad.output;
        for (std::size_t i = 0; i < gm.data().size(); ++i) {
          auto plus = p, minus = p;
          (layer == 0 ? plus.hidden : plus.output).data()[i] += h;
          (layer == 0 ? minus.hidden : minus.output).data()[i] -= h;
          analytic.push_back(gm.data()[i]);
          numeric.push_back((cost(plus) - cost(minus)) / (2 * h));
        }
      }
      worst = std::max(worst, relativeDifference(analytic, numeric));
    }
  }
  return {worst < 1e-5, "max relative gradient error " + num(worst) + " over " + std::to_string(trials) +
                            " trials x 2 costs"};
}

Outcome rateIdentity() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 200.0);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  const double xi = 0.01;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> phi(len(rng));
    for (double& v : phi) v = u(rng);
    double s = 0.0;
    for (double e : inverseDistanceRates(phi, xi)) s += e;
    worst = std::max(worst, std::abs(s - xi));
  }
  bool exactEqual = true;
  for (std::size_t n = 1; n <= 40; ++n)
    for (double e : inverseDistanceRates(std::vector<double>(n, 7.3), xi))
      exactEqual = exactEqual && e == xi / static_cast<double>(n);
  return {worst < 1e-12 && exactEqual,
          "max |sum - xi| " + num(worst) + ", equal-distance exact: " + (exactEqual ? "yes" : "no")};
}

Outcome cyclicTime() {
  bool symmetric = true, bounded = true, brute = true;
  for (int a = 1; a <= 365; ++a)
    for (int b = 1; b <= 365; ++b) {
      const int d = timeDifference(a, b);
      symmetric = symmetric && d == timeDifference(b, a);
      bounded = bounded && d >= 0 && d <= 183;
      brute = brute && d == std::min(std::abs(a - b), 365 - std::abs(a - b));
    }
  return {symmetric && bounded && brute, std::string("symmetric ") + (symmetric ? "yes" : "no") + ", <= 183 " +
                                             (bounded ? "yes" : "no") + ", matches brute force " +
                                             (brute ? "yes" : "no")};
}

const MethodSummary* summaryOf(const ExperimentReport& r, Method m) {
  for (const auto& s : r.methods)
    if (s.method == m) return &s;
  return nullptr;
}

const ComparisonStat* comparisonOf(const ExperimentReport& r, Method other) {
  for (const auto& c : r.comparisons)
    if (c.better == Method::mtl && c.other == other) return &c;
  return nullptr;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s  %2d  %-34s %s  [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "ray model vs fine Snell oracle", rayOracle);
  report(2, "grazing-angle round trip", angleRoundTrip);
  report(3, "EOF extension exactness", eofExactness);
  report(4, "analytic vs finite-difference grads", gradientChecks);
  report(5, "learning-rate identity", rateIdentity);

  // Criteria 6 to 8 share one 100-repetition run on the default world.
  BenchmarkConfig cfg;
  std::optional<ExperimentReport> bench;
  double benchSeconds = 0.0;
  std::string benchError;
  {
    const auto start = std::chrono::steady_clock::now();
    try {
      bench = runBenchmark(cfg);
    } catch (const std::exception& e) {
      benchError = e.what();
    }
    benchSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  report(6, "MTL beats FNN and SIP (sign test)", [&]() -> Outcome {
    if (!bench) return {false, "benchmark failed: " + benchError};
    std::cout << '\n' << accuracyMarkdown(*bench) << '\n';
    const auto* fnn = comparisonOf(*bench, Method::fnn);
    const auto* sip = comparisonOf(*bench, Method::sip);
    const auto* mtl = summaryOf(*bench, Method::mtl);
    const auto* f = summaryOf(*bench, Method::fnn);
    const auto* s = summaryOf(*bench, Method::sip);
    const bool ordering = mtl->averageRmse < f->averageRmse && mtl->averageRmse < s->averageRmse;
    const bool pass = ordering && fnn->pValue < 0.05 && sip->pValue < 0.05 && benchSeconds < 600.0;
    return {pass, "mean RMSE MTL " + num(mtl->averageRmse) + ", FNN " + num(f->averageRmse) + ", SIP " +
                      num(s->averageRmse) + "; MTL wins " + std::to_string(fnn->wins) + "/" +
                      std::to_string(fnn->trials) + " vs FNN (p=" + num(fnn->pValue) + "), " +
                      std::to_string(sip->wins) + "/" + std::to_string(sip->trials) + " vs SIP (p=" +
                      num(sip->pValue) + "); run " + num(benchSeconds) + " s"};
  });

  report(7, "epoch-1 task loss MTL < FNN", [&]() -> Outcome {
    if (!bench) return {false, "benchmark failed: " + benchError};
    const auto* mtl = summaryOf(*bench, Method::mtl);
    const auto* fnn = summaryOf(*bench, Method::fnn);
    if (mtl->meanLossHistory.empty() || fnn->meanLossHistory.empty()) return {false, "no loss history"};
    const double a = mtl->meanLossHistory.front(), b = fnn->meanLossHistory.front();
    return {a < b && mtl->successes >= 20,
            "mean epoch-1 loss MTL " + num(a) + " vs FNN " + num(b) + " over " + std::to_string(mtl->successes) +
                " seeds"};
  });

  report(8, "inversion timing", [&]() -> Outcome {
    if (!bench) return {false, "benchmark failed: " + benchError};
    std::cout << '\n' << timingMarkdown(*bench) << '\n';
    const double mtl = summaryOf(*bench, Method::mtl)->inversionSeconds;
    const double mfp = summaryOf(*bench, Method::mfp)->inversionSeconds;
    const double ratio = mfp / mtl;
    return {mtl < 0.010 && ratio >= 100.0,
            "MTL forward median " + num(mtl * 1e3) + " ms, EOF-MFP " + num(mfp) + " s, ratio " + num(ratio)};
  });

  report(9, "deterministic reports", []() -> Outcome {
    BenchmarkConfig c;
    c.repetitions = 4;
    const auto ex = prepareExperiment(c);
    const auto a = maskTiming(reportToJson(runBenchmark(ex, c))).dump();
    c.workers = 1;
    const auto b = maskTiming(reportToJson(runBenchmark(prepareExperiment(c), c))).dump();
    return {a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
  });

  report(10, "cyclic time difference", cyclicTime);

  std::printf("\n%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
