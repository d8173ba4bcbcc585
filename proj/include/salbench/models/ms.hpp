#pragma once

#include <salbench/geometry.hpp>
#include <salbench/laplacian.hpp>
#include <salbench/saliency_map.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace salbench {

struct SpectralData {
  std::vector<double> frequencies;   // lowest eigenvalues, ascending
  Eigen::MatrixXd basis;             // matching orthonormal eigenvectors
  std::vector<double> log_spectrum;  // log(1 + |λ|)
  std::vector<double> avg_spectrum;  // centred moving average of log_spectrum
};

/// Centred moving average with the window clipped at both ends.
inline std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  std::vector<double> out(v.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - half);
    const auto hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double s = 0.0;
    for (auto j = lo; j <= hi; ++j) s += v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

/// Spectral irregularity mapped back to the vertices:
/// S(v) = Σ_f |L_f − A_f| · b_f(v)², not rescaled. Returns nullopt when the
/// Laplacian is unusable (isolated vertex, zero-area face, failed solve, or a
/// clearly negative eigenvalue).
inline std::optional<std::vector<double>> spectral_irregularity(const TriangleMesh& mesh, std::size_t n_freq,
                                                                std::size_t window, std::size_t dense_limit,
                                                                SpectralData* data = nullptr) {
  const auto lap = cotangent_laplacian(mesh);
  if (!lap) return std::nullopt;
  const auto pairs = lowest_eigenpairs(symmetric_laplacian(*lap), n_freq, dense_limit);
  if (!pairs || pairs->values.size() == 0) return std::nullopt;
  if (pairs->values(0) < -1e-8 * std::max(1.0, std::abs(pairs->values(pairs->values.size() - 1)))) {
    return std::nullopt;
  }

  SpectralData sd;
  const auto m = static_cast<std::size_t>(pairs->values.size());
  for (std::size_t f = 0; f < m; ++f) {
    const double lambda = pairs->values(static_cast<Eigen::Index>(f));
    sd.frequencies.push_back(lambda);
    sd.log_spectrum.push_back(std::log1p(std::abs(lambda)));
  }
  sd.avg_spectrum = moving_average(sd.log_spectrum, window);
  sd.basis = pairs->vectors;

  std::vector<double> s(mesh.vertices.size(), 0.0);
  for (std::size_t f = 0; f < m; ++f) {
    const double irregularity = std::abs(sd.log_spectrum[f] - sd.avg_spectrum[f]);
    for (std::size_t v = 0; v < s.size(); ++v) {
      const double b = sd.basis(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(f));
      s[v] += irregularity * b * b;
    }
  }
  if (data != nullptr) *data = std::move(sd);
  return s;
}

/// One round of explicit Laplacian smoothing: x ← x − step · M⁻¹ L x.
inline std::optional<TriangleMesh> laplacian_smooth_step(const TriangleMesh& mesh, double step) {
  const auto lap = cotangent_laplacian(mesh);
  if (!lap) return std::nullopt;
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  Eigen::MatrixXd x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = mesh.vertices[static_cast<std::size_t>(i)].transpose();
  const Eigen::MatrixXd lx = lap->stiffness * x;
  TriangleMesh out = mesh;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.vertices[static_cast<std::size_t>(i)] -= step * lx.row(i).transpose() / lap->mass(i);
  }
  return out;
}

/// Multi-scale spectral mesh saliency. Single-scale maps are computed on the
/// mesh smoothed to scales {ε², 2ε², …, 5ε²} (k smoothing rounds of step ε²
/// in the unit frame); the result is log(1 + G * Σ_k |S_{k+1} − S_k|), with G
/// a normalised Gaussian average. Unusable Laplacians give the all-zero map.
inline SaliencyMap compute_ms(const TriangleMesh& mesh, const ModelParams& params, std::string shape_id = {},
                              Warnings* warnings = nullptr) {
  params.validate();
  const std::size_t n = mesh.vertices.size();
  SaliencyMap zero{shape_id, ModelTag::MS, std::vector<double>(n, 0.0)};
  if (n == 0) return zero;
  validate_mesh(mesh);

  TriangleMesh current = mesh;
  const UnitFrame frame(bounding_sphere(mesh.vertices));
  current.vertices = frame.to_unit(mesh.vertices);
  const double step = params.epsilon * params.epsilon;

  std::vector<std::vector<double>> scales;
  for (int k = 1; k <= 5; ++k) {
    auto smoothed = laplacian_smooth_step(current, step);
    if (!smoothed) {
      warn(warnings, "spectral saliency: Laplacian has no usable spectrum, assigning 0");
      return zero;
    }
    current = std::move(*smoothed);
    auto s = spectral_irregularity(current, params.n_freq, params.ms_window, params.ms_dense_limit);
    if (!s) {
      warn(warnings, "spectral saliency: Laplacian has no usable spectrum, assigning 0");
      return zero;
    }
    scales.push_back(rescale_unit(*s));
  }

  std::vector<double> diff(n, 0.0);
  for (std::size_t k = 0; k + 1 < scales.size(); ++k) {
    for (std::size_t v = 0; v < n; ++v) diff[v] += std::abs(scales[k + 1][v] - scales[k][v]);
  }
  const std::vector<double> ones(n, 1.0);
  const auto num = gaussian_smooth(current.vertices, diff, params.ms_smoothing_sigma);
  const auto den = gaussian_smooth(current.vertices, ones, params.ms_smoothing_sigma);
  std::vector<double> out(n);
  for (std::size_t v = 0; v < n; ++v) out[v] = std::log1p(den[v] > 0.0 ? num[v] / den[v] : diff[v]);
  return make_map(std::move(shape_id), ModelTag::MS, out);
}

}  // namespace salbench
