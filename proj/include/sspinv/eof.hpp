#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sspinv/error.hpp"
#include "sspinv/linalg.hpp"
#include "sspinv/profile.hpp"

namespace sspinv {

// Mean profile plus the leading empirical orthogonal functions of a profile set.
struct EofBasis {
  std::vector<double> grid;
  std::vector<double> mean;
  Matrix vectors;               // grid.size() x order, orthonormal columns
  std::vector<double> values;   // retained eigenvalues, descending
  std::vector<double> spectrum; // every eigenvalue of the covariance, descending

  std::size_t order() const noexcept { return values.size(); }

  std::vector<double> reconstruct(std::span<const double> coefficients) const {
    if (coefficients.size() != order()) throw ShapeError("coefficient count != basis order");
    std::vector<double> out = mean;
    for (std::size_t r = 0; r < grid.size(); ++r)
      for (std::size_t k = 0; k < order(); ++k) out[r] += vectors(r, k) * coefficients[k];
    return out;
  }
};

struct EofCoefficients {
  std::vector<double> values;
};

struct EofBuildOptions {
  // Above this grid length the eigenproblem is solved in the dual
  // (profile x profile) space when there are fewer profiles than depths.
  std::size_t dualThreshold = 600;
  JacobiOptions jacobi{};
};

namespace detail {

inline void requireCommonGrid(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("profiles are not on a common grid");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(a[i]))) throw ShapeError("profiles are not on a common grid");
}

inline void applySignConvention(Matrix& v, std::size_t col) {
  std::size_t lead = 0;
  for (std::size_t r = 1; r < v.rows(); ++r)
    if (std::abs(v(r, col)) > std::abs(v(lead, col))) lead = r;
  if (v(lead, col) < 0.0)
    for (std::size_t r = 0; r < v.rows(); ++r) v(r, col) = -v(r, col);
}

}  // namespace detail

// Profiles given as speed vectors on `grid`. Covariance is (1/I) X X^T of the
// mean-removed speeds, as in the classic EOF analysis of hydrographic casts.
inline EofBasis buildEofBasis(std::span<const double> grid, std::span<const std::vector<double>> speeds,
                              std::size_t retainOrder, const EofBuildOptions& opts = {}) {
  const std::size_t n = grid.size();
  const std::size_t count = speeds.size();
  if (count < 2) throw DataError("EOF basis needs at least 2 profiles");
  for (const auto& s : speeds)
    if (s.size() != n) throw ShapeError("profile length != grid length");
  if (retainOrder < 1 || retainOrder > std::min(n, count))
    throw ConfigError("retain order " + std::to_string(retainOrder) + " outside [1, " +
                      std::to_string(std::min(n, count)) + "]");

  EofBasis basis;
  basis.grid.assign(grid.begin(), grid.end());
  basis.mean.assign(n, 0.0);
  for (const auto& s : speeds)
    for (std::size_t r = 0; r < n; ++r) basis.mean[r] += s[r];
  for (double& m : basis.mean) m /= static_cast<double>(count);

  Matrix residual(n, count);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t r = 0; r < n; ++r) residual(r, i) = speeds[i][r] - basis.mean[r];

  const double inv = 1.0 / static_cast<double>(count);
  Matrix full(n, retainOrder);
  std::vector<double> spectrum;

  if (n > opts.dualThreshold && count < n) {
    Matrix gram(count, count);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i; j < count; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += residual(r, i) * residual(r, j);
        gram(i, j) = gram(j, i) = s * inv;
      }
    const auto eig = jacobiEigen(gram, opts.jacobi);
    spectrum = eig.values;
    spectrum.resize(n, 0.0);
    for (std::size_t k = 0; k < retainOrder; ++k) {
      const double mu = eig.values[k];
      if (!(mu > 1e-12 * std::max(1.0, eig.values.front())))
        throw DataError("retained EOF mode " + std::to_string(k + 1) + " has no variance");
      const double scale = 1.0 / std::sqrt(static_cast<double>(count) * mu);
      for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += residual(r, i) * eig.vectors(i, k);
        full(r, k) = s * scale;
      }
      detail::applySignConvention(full, k);
    }
  } else {
    Matrix cov(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += residual(a, i) * residual(b, i);
        cov(a, b) = cov(b, a) = s * inv;
      }
    const auto eig = jacobiEigen(cov, opts.jacobi);
    spectrum = eig.values;
    for (std::size_t k = 0; k < retainOrder; ++k)
      for (std::size_t r = 0; r < n; ++r) full(r, k) = eig.vectors(r, k);
  }

  const double clampTol = 1e-10 * std::max(1.0, spectrum.empty() ? 0.0 : spectrum.front());
  for (double& v : spectrum)
    if (v < 0.0 && v >= -clampTol) v = 0.0;
  basis.spectrum = spectrum;
  basis.values.assign(spectrum.begin(), spectrum.begin() + static_cast<std::ptrdiff_t>(retainOrder));
  basis.vectors = std::move(full);
  return basis;
}

inline EofBasis buildEofBasis(std::span<const SoundSpeedProfile> profiles, std::size_t retainOrder,
                              const EofBuildOptions& opts = {}) {
  if (profiles.size() < 2) throw DataError("EOF basis needs at least 2 profiles");
  const auto grid = profiles.front().depths();
  std::vector<std::vector<double>> speeds;
  speeds.reserve(profiles.size());
  for (const auto& p : profiles) {
    detail::requireCommonGrid(grid, p.depths());
    speeds.emplace_back(p.speeds().begin(), p.speeds().end());
  }
  return buildEofBasis(grid, speeds, retainOrder, opts);
}

// cf = V^T (s - mean)
inline EofCoefficients projectOntoBasis(const EofBasis& basis, std::span<const double> speeds) {
  if (speeds.size() != basis.grid.size()) throw ShapeError("target length != basis grid length");
  EofCoefficients cf;
  cf.values.assign(basis.order(), 0.0);
  for (std::size_t r = 0; r < basis.grid.size(); ++r) {
    const double x = speeds[r] - basis.mean[r];
    for (std::size_t k = 0; k < basis.order(); ++k) cf.values[k] += basis.vectors(r, k) * x;
  }
  return cf;
}

inline EofCoefficients projectOntoBasis(const EofBasis& basis, const SoundSpeedProfile& target) {
  detail::requireCommonGrid(basis.grid, target.depths());
  return projectOntoBasis(basis, target.speeds());
}

// Truncates every profile at `cutDepth`, inserting an interpolated sample at
// the cut when it falls between two samples.
inline std::vector<SoundSpeedProfile> interceptProfiles(std::span<const SoundSpeedProfile> full, double cutDepth) {
  std::vector<SoundSpeedProfile> out;
  out.reserve(full.size());
  for (const auto& p : full) {
    if (p.maxDepth() < cutDepth)
      throw DepthCoverageError("profile '" + p.id() + "' reaches " + std::to_string(p.maxDepth()) +
                               " m, shallower than the cut at " + std::to_string(cutDepth) + " m");
    std::vector<double> d, s;
    for (std::size_t i = 0; i < p.size() && p.depths()[i] < cutDepth; ++i) {
      d.push_back(p.depths()[i]);
      s.push_back(p.speeds()[i]);
    }
    d.push_back(cutDepth);
    s.push_back(p.speedAt(cutDepth));
    out.push_back(p.withSamples(std::move(d), std::move(s)));
  }
  return out;
}

inline nlohmann::json basisToJson(const EofBasis& b) {
  auto columns = nlohmann::json::array();
  for (std::size_t k = 0; k < b.order(); ++k) columns.push_back(b.vectors.column(k));
  return {{"grid", b.grid}, {"mean", b.mean}, {"eigenvalues", b.values}, {"eigenvectors", columns}};
}

inline EofBasis basisFromJson(const nlohmann::json& j) {
  EofBasis b;
  b.grid = j.at("grid").get<std::vector<double>>();
  b.mean = j.at("mean").get<std::vector<double>>();
  b.values = j.at("eigenvalues").get<std::vector<double>>();
  b.spectrum = b.values;
  const auto cols = j.at("eigenvectors").get<std::vector<std::vector<double>>>();
  if (cols.size() != b.values.size() || b.mean.size() != b.grid.size()) throw ShapeError("basis JSON dimensions");
  b.vectors = Matrix(b.grid.size(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k].size() != b.grid.size()) throw ShapeError("basis JSON eigenvector length");
    for (std::size_t r = 0; r < b.grid.size(); ++r) b.vectors(r, k) = cols[k][r];
  }
  return b;
}

}  // namespace sspinv
