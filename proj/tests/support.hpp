#pragma once

// Independent reference computations used by the unit tests and the
// acceptance runner. None of these call into the library's ray or EOF code.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sspinv/profile.hpp"
#include "sspinv/ray.hpp"

namespace testsupport {

struct FineRay {
  double range = 0.0;
  double time = 0.0;
};

// Marches dz = step from the shallower to the deeper node with Snell's law
// cos(theta(z)) = cos(theta0) * c(z) / c(z0), c piecewise linear in depth.
// Simpson's rule on each step.
inline FineRay snellIntegrate(const std::vector<double>& depths, const std::vector<double>& speeds, double theta,
                              std::size_t source, std::size_t receiver, double step = 0.01) {
  const std::size_t lo = std::min(source, receiver), hi = std::max(source, receiver);
  const double p = std::cos(theta) / speeds[source];
  auto speedAt = [&](double z) {
    std::size_t i = lo;
    while (i + 1 < hi && z > depths[i + 1]) ++i;
    const double t = (z - depths[i]) / (depths[i + 1] - depths[i]);
    return speeds[i] + t * (speeds[i + 1] - speeds[i]);
  };
  auto integrand = [&](double z, double& dx, double& dt) {
    const double c = speedAt(z);
    const double cosT = p * c;
    const double sinT = std::sqrt(1.0 - cosT * cosT);
    dx = cosT / sinT;
    dt = 1.0 / (c * sinT);
  };
  FineRay out;
  for (std::size_t layer = lo; layer < hi; ++layer) {
    const double z0 = depths[layer], z1 = depths[layer + 1];
    const auto n = static_cast<std::size_t>(std::ceil((z1 - z0) / step - 1e-9));
    const double h = (z1 - z0) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double a = z0 + h * static_cast<double>(k);
      double x0, t0, xm, tm, x1, t1;
      integrand(a, x0, t0);
      integrand(a + 0.5 * h, xm, tm);
      integrand(a + h, x1, t1);
      out.range += h / 6.0 * (x0 + 4.0 * xm + x1);
      out.time += h / 6.0 * (t0 + 4.0 * tm + t1);
    }
  }
  return out;
}

// Random layered medium: speed either rising or falling with depth, never
// turning the ray for grazing angles above `minTheta` when launched at the
// top node.
inline sspinv::LayeredMedium randomGradientMedium(std::mt19937_64& rng, std::size_t nodes = 12,
                                                  double maxDepth = 3000.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> d(nodes), s(nodes);
  for (std::size_t i = 0; i < nodes; ++i) d[i] = maxDepth * static_cast<double>(i) / static_cast<double>(nodes - 1);
  s[0] = 1480.0 + 40.0 * u(rng);
  for (std::size_t i = 1; i < nodes; ++i) s[i] = s[i - 1] + (u(rng) - 0.5) * 30.0;
  return {d, s};
}

// Family spanned by a mean curve and three smooth modes on a 1 m grid.
struct ModeFamily {
  std::vector<double> depths;
  std::vector<double> mean;
  std::vector<std::vector<double>> modes;

  sspinv::SoundSpeedProfile make(const std::vector<double>& a, std::string id = {}) const {
    std::vector<double> s = mean;
    for (std::size_t k = 0; k < modes.size(); ++k)
      for (std::size_t r = 0; r < s.size(); ++r) s[r] += a[k] * modes[k][r];
    return {depths, s, {}, 1, std::move(id)};
  }
};

inline ModeFamily threeModeFamily(double maxDepth = 3500.0) {
  ModeFamily f;
  for (double z = 0.0; z <= maxDepth + 1e-9; z += 1.0) f.depths.push_back(z);
  f.modes.resize(3);
  for (double z : f.depths) {
    const double eta = 2.0 * (z - 1300.0) / 1300.0;
    f.mean.push_back(1500.0 * (1.0 + 0.00737 * (eta - 1.0 + std::exp(-eta))));
    f.modes[0].push_back(std::exp(-z / 800.0));
    f.modes[1].push_back(std::sin(std::numbers::pi * z / maxDepth));
    f.modes[2].push_back(std::cos(2.0 * std::numbers::pi * z / maxDepth) * std::exp(-z / 2000.0));
  }
  return f;
}

}  // namespace testsupport
