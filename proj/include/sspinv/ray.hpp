#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sspinv/error.hpp"
#include "sspinv/profile.hpp"

namespace sspinv {

// Horizontally stratified medium with linear speed variation inside each layer.
class LayeredMedium {
public:
  LayeredMedium(std::vector<double> depths, std::vector<double> speeds)
      : depths_(std::move(depths)), speeds_(std::move(speeds)) {
    if (depths_.size() != speeds_.size()) throw ShapeError("medium depths and speeds differ in length");
    if (depths_.size() < 2) throw DataError("medium needs at least 2 nodes");
    for (std::size_t i = 0; i < depths_.size(); ++i) {
      if (!(speeds_[i] > 0.0) || !std::isfinite(speeds_[i])) throw DataError("medium speeds must be positive");
      if (i > 0 && !(depths_[i] > depths_[i - 1])) throw DataError("layer thickness must be positive");
    }
  }

  static LayeredMedium fromProfile(const SoundSpeedProfile& p) {
    return LayeredMedium({p.depths().begin(), p.depths().end()}, {p.speeds().begin(), p.speeds().end()});
  }

  std::span<const double> depths() const noexcept { return depths_; }
  std::span<const double> speeds() const noexcept { return speeds_; }
  std::size_t nodeCount() const noexcept { return depths_.size(); }
  double thickness(std::size_t layer) const { return depths_[layer + 1] - depths_[layer]; }

  // Index of the grid node closest to `depth` (ties go to the shallower node).
  std::size_t nearestIndex(double depth) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < depths_.size(); ++i)
      if (std::abs(depths_[i] - depth) < std::abs(depths_[best] - depth)) best = i;
    return best;
  }

private:
  std::vector<double> depths_;
  std::vector<double> speeds_;
};

namespace detail {

struct RaySpan {
  std::size_t first;  // shallower node
  std::size_t last;   // deeper node
};

inline RaySpan raySpan(const LayeredMedium& m, std::size_t source, std::size_t receiver) {
  if (source >= m.nodeCount() || receiver >= m.nodeCount()) throw ShapeError("depth index outside medium");
  return source <= receiver ? RaySpan{source, receiver} : RaySpan{receiver, source};
}

// sin of the local grazing angle at every node of the span; throws when the
// ray turns (Gamma <= 0) anywhere on the way.
inline std::vector<double> localSines(const LayeredMedium& m, double snell, RaySpan span) {
  std::vector<double> sines(span.last - span.first + 1);
  for (std::size_t d = span.first; d <= span.last; ++d) {
    const double c = snell * m.speeds()[d];
    const double gamma = 1.0 - c * c;
    if (!(gamma > 0.0))
      throw RayTurnsError(m.depths()[d], "ray turns at depth " + std::to_string(m.depths()[d]) + " m");
    sines[d - span.first] = std::sqrt(gamma);
  }
  return sines;
}

inline void checkAngle(double theta) {
  if (!(theta > 0.0 && theta <= std::numbers::pi / 2)) throw DomainError("grazing angle must lie in (0, pi/2]");
}

}  // namespace detail

// Snell parameter cos(theta)/s at the source node.
inline double snellParameter(const LayeredMedium& m, double theta, std::size_t source) {
  return std::cos(theta) / m.speeds()[source];
}

// Local grazing-angle cosines along the ray, cos(theta_d) = (cos(theta)/s_src) * s_d.
inline std::vector<double> localCosines(const LayeredMedium& m, double theta, std::size_t source,
                                        std::size_t receiver) {
  const auto span = detail::raySpan(m, source, receiver);
  const double p = snellParameter(m, theta, source);
  std::vector<double> out;
  for (std::size_t d = span.first; d <= span.last; ++d) out.push_back(p * m.speeds()[d]);
  return out;
}

// Horizontal distance covered by a direct ray leaving the source node at
// grazing angle theta and arriving at the receiver node. Each layer
// contributes |dz/ds * (sqrt(G_d) - sqrt(G_{d+1}))| / p; the difference of
// roots is rationalized so that isovelocity layers reduce to dz/tan(theta_d)
// without a division by ds.
inline double horizontalRange(const LayeredMedium& m, double theta, std::size_t source, std::size_t receiver) {
  detail::checkAngle(theta);
  const auto span = detail::raySpan(m, source, receiver);
  const double p = snellParameter(m, theta, source);
  const auto sines = detail::localSines(m, p, span);
  const auto speeds = m.speeds();
  double range = 0.0;
  for (std::size_t d = span.first; d < span.last; ++d) {
    const double a = sines[d - span.first];
    const double b = sines[d - span.first + 1];
    range += m.thickness(d) * p * (speeds[d] + speeds[d + 1]) / (a + b);
  }
  return range;
}

// Propagation time along the same ray: sum of |dz/ds * ln(s_{d+1}(1+sqrt G_d) / (s_d(1+sqrt G_{d+1})))|.
// The logarithm is evaluated as log1p(ds * q) so small gradients keep full
// precision; |ds| < 1e-9 m/s uses the isovelocity limit dz/(s_d sin theta_d).
inline double travelTime(const LayeredMedium& m, double theta, std::size_t source, std::size_t receiver) {
  detail::checkAngle(theta);
  const auto span = detail::raySpan(m, source, receiver);
  const double p = snellParameter(m, theta, source);
  const auto sines = detail::localSines(m, p, span);
  const auto speeds = m.speeds();
  double time = 0.0;
  for (std::size_t d = span.first; d < span.last; ++d) {
    const double a = sines[d - span.first];
    const double b = sines[d - span.first + 1];
    const double s0 = speeds[d];
    const double s1 = speeds[d + 1];
    const double ds = s1 - s0;
    const double dz = m.thickness(d);
    if (std::abs(ds) < 1e-9) {
      time += dz / (s0 * a);
      continue;
    }
    // ratio - 1 = ds * q
    const double q = ((1.0 + a) + s0 * p * p * (s0 + s1) / (a + b)) / (s0 * (1.0 + b));
    time += std::abs(dz / ds * std::log1p(ds * q));
  }
  return time;
}

struct AngleSolverOptions {
  int maxIterations = 200;
  double angleGuard = 1e-9;
  double rangeTolerance = 1e-3;
};

// Grazing angle whose direct ray reaches horizontal distance `targetRange`.
// Range falls monotonically with the angle, so bisection over
// (turning threshold + guard, pi/2] converges.
inline double solveGrazingAngle(const LayeredMedium& m, std::size_t source, std::size_t receiver,
                                double targetRange, const AngleSolverOptions& opts = {}) {
  if (!(targetRange >= 0.0) || !std::isfinite(targetRange)) throw DomainError("target range must be >= 0");
  const auto span = detail::raySpan(m, source, receiver);
  const double sourceSpeed = m.speeds()[source];
  double fastest = sourceSpeed;
  for (std::size_t d = span.first; d <= span.last; ++d) fastest = std::max(fastest, m.speeds()[d]);
  const double thetaMin = std::acos(sourceSpeed / fastest);

  double hi = std::numbers::pi / 2;
  if (span.first == span.last) {
    if (targetRange == 0.0) return hi;
    throw NoDirectPathError("source and receiver share a depth node; no refracted direct path");
  }
  if (targetRange <= horizontalRange(m, hi, source, receiver)) return hi;

  // near grazing, cos(theta) rounds to 1 and the fastest node reads as a
  // turning point; back off until the ray is representable
  double lo = thetaMin + opts.angleGuard;
  double reach = 0.0;
  for (double guard = opts.angleGuard;; guard *= 4.0) {
    lo = thetaMin + guard;
    try {
      reach = horizontalRange(m, lo, source, receiver);
      break;
    } catch (const RayTurnsError&) {
      if (lo >= hi) throw;
    }
  }
  if (targetRange > reach)
    throw NoDirectPathError("range " + std::to_string(targetRange) + " m exceeds direct-path reach " +
                            std::to_string(reach) + " m");

  for (int it = 0; it < opts.maxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (horizontalRange(m, mid, source, receiver) > targetRange)
      lo = mid;
    else
      hi = mid;
  }
  const double theta = 0.5 * (lo + hi);
  if (std::abs(horizontalRange(m, theta, source, receiver) - targetRange) >= opts.rangeTolerance)
    throw NoDirectPathError("grazing-angle search did not reach the range tolerance");
  return theta;
}

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // depth, positive down
};

struct AcousticScenario {
  Position source;
  std::vector<Position> receivers;
  LayeredMedium medium;

  void validate() const {
    if (receivers.empty()) throw DataError("scenario needs at least one receiver");
    const auto d = medium.depths();
    for (const auto& r : receivers)
      if (r.z < d.front() || r.z > d.back()) throw DataError("receiver depth outside the medium");
  }
};

// Propagation times flattened receiver-major: index = receiver * pingCount + ping.
struct TravelTimeObservation {
  std::vector<double> times;
  std::size_t pingCount = 0;
  std::size_t receiverCount = 0;

  double at(std::size_t ping, std::size_t receiver) const { return times.at(receiver * pingCount + ping); }

  void validate() const {
    if (times.size() != pingCount * receiverCount) throw ShapeError("observation length != pings * receivers");
    for (double t : times)
      if (!(t > 0.0) || !std::isfinite(t)) throw DataError("observation times must be positive and finite");
  }
  friend bool operator==(const TravelTimeObservation&, const TravelTimeObservation&) = default;
};

// Direct-path time between one source and one receiver position.
inline double directPathTime(const LayeredMedium& m, const Position& src, const Position& rcv) {
  const std::size_t s = m.nearestIndex(src.z);
  const std::size_t r = m.nearestIndex(rcv.z);
  const double h = std::hypot(rcv.x - src.x, rcv.y - src.y);
  const double theta = solveGrazingAngle(m, s, r, h);
  return travelTime(m, theta, s, r);
}

inline TravelTimeObservation simulateObservation(const AcousticScenario& scenario, std::span<const Position> pings,
                                                 double noiseSigma, std::uint64_t seed) {
  scenario.validate();
  if (!(noiseSigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  TravelTimeObservation obs;
  obs.pingCount = pings.size();
  obs.receiverCount = scenario.receivers.size();
  obs.times.reserve(obs.pingCount * obs.receiverCount);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (const auto& rcv : scenario.receivers)
    for (const auto& ping : pings) {
      double t = directPathTime(scenario.medium, ping, rcv);
      if (noiseSigma > 0.0) t += noiseSigma * noise(rng);
      obs.times.push_back(t);
    }
  return obs;
}

}  // namespace sspinv
