#pragma once

#include <salbench/geometry.hpp>
#include <salbench/neighbor_index.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace salbench {

/// Reflection-invariant pair feature: |α|, |φ| in [0,1], |θ| in [0,π].
struct AngleTriple {
  double alpha = 0.0;
  double phi = 0.0;
  double theta = 0.0;
};

inline constexpr std::size_t kBinsPerAngle = 11;
inline constexpr std::size_t kDescriptorSize = 3 * kBinsPerAngle;

/// Three concatenated 11-bin histograms (α, φ, θ).
struct Descriptor33 {
  std::array<double, kDescriptorSize> bins{};

  double& operator[](std::size_t i) { return bins[i]; }
  double operator[](std::size_t i) const { return bins[i]; }

  Descriptor33& operator+=(const Descriptor33& o) {
    for (std::size_t i = 0; i < kDescriptorSize; ++i) bins[i] += o.bins[i];
    return *this;
  }
  Descriptor33& operator*=(double s) {
    for (auto& b : bins) b *= s;
    return *this;
  }
  double sum() const {
    double s = 0.0;
    for (auto b : bins) s += b;
    return s;
  }
  bool is_zero() const { return sum() == 0.0; }
  friend bool operator==(const Descriptor33&, const Descriptor33&) = default;
};

/// Histogram conventions. Defaults follow the usual FPFH implementation:
/// fixed ranges after absolute values, each block normalised to sum to 100.
struct HistogramConfig {
  double alpha_max = 1.0;
  double phi_max = 1.0;
  double theta_max = std::numbers::pi;
  double block_mass = 100.0;  // <= 0 disables normalisation (raw counts)
};

/// Pair feature of (p_i, n_i) against (p_j, n_j) in the Darboux frame
/// u = n_i, v = u × d, w = u × v, with d the unit baseline.
///
/// When n_i is parallel to the baseline the frame is undefined; the baseline
/// is nudged by 1e-8 along its smallest-magnitude axis.
inline AngleTriple darboux_angles(const Vec3& pi, const Vec3& ni, const Vec3& pj, const Vec3& nj) {
  Vec3 baseline = pj - pi;
  const double len = baseline.norm();
  if (!(len > 0.0)) throw Error("zero baseline: coincident points");
  Vec3 d = baseline / len;
  const Vec3& u = ni;
  Vec3 v = u.cross(d);
  if (v.norm() < 1e-12) {
    int axis = 0;
    d.cwiseAbs().minCoeff(&axis);
    d = (d + 1e-8 * Vec3::Unit(axis)).normalized();
    v = u.cross(d);
  }
  v.normalize();
  const Vec3 w = u.cross(v);

  AngleTriple t;
  t.alpha = std::abs(v.dot(nj));
  t.phi = std::abs(u.dot(d));
  t.theta = std::abs(std::atan2(w.dot(nj), u.dot(nj)));
  return t;
}

namespace detail {

inline std::size_t bin_of(double value, double max) {
  if (!(value > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(value / max * static_cast<double>(kBinsPerAngle));
  return std::min(b, kBinsPerAngle - 1);
}

inline void accumulate(Descriptor33& h, const AngleTriple& t, const HistogramConfig& cfg) {
  h[detail::bin_of(t.alpha, cfg.alpha_max)] += 1.0;
  h[kBinsPerAngle + detail::bin_of(t.phi, cfg.phi_max)] += 1.0;
  h[2 * kBinsPerAngle + detail::bin_of(t.theta, cfg.theta_max)] += 1.0;
}

inline void normalize_blocks(Descriptor33& h, double mass) {
  if (mass <= 0.0) return;
  for (std::size_t block = 0; block < 3; ++block) {
    double s = 0.0;
    for (std::size_t i = 0; i < kBinsPerAngle; ++i) s += h[block * kBinsPerAngle + i];
    if (s <= 0.0) continue;
    for (std::size_t i = 0; i < kBinsPerAngle; ++i) h[block * kBinsPerAngle + i] *= mass / s;
  }
}

inline void require_normals(const PointCloud& cloud) {
  if (!cloud.has_normals() || cloud.normals.size() != cloud.size()) {
    throw Error("descriptor computation requires oriented normals");
  }
}

}  // namespace detail

/// Simplified point feature histogram of point `i` over its neighbors within `radius`.
/// A point with no neighbor gets the zero descriptor and a warning.
inline Descriptor33 spfh(std::uint32_t i, const PointCloud& cloud, const NeighborIndex& index,
                         double radius, Warnings* warnings = nullptr,
                         const HistogramConfig& cfg = {}) {
  detail::require_normals(cloud);
  if (!(radius > 0.0)) throw Error("support radius must be positive");
  Descriptor33 h;
  const auto nbrs = index.radius_search(i, radius);
  if (nbrs.empty()) {
    warn(warnings, "point " + std::to_string(i) + " has no neighbor within the support radius");
    return h;
  }
  for (const auto& nb : nbrs) {
    if (nb.dist2 == 0.0) continue;  // duplicate position: no baseline
    detail::accumulate(h, darboux_angles(cloud.points[i], cloud.normals[i], cloud.points[nb.index],
                                         cloud.normals[nb.index]),
                       cfg);
  }
  detail::normalize_blocks(h, cfg.block_mass);
  return h;
}

/// SPFH for every point; isolated points are summarised in a single warning.
inline std::vector<Descriptor33> compute_spfh_all(const PointCloud& cloud, const NeighborIndex& index,
                                                  double radius, Warnings* warnings = nullptr,
                                                  const HistogramConfig& cfg = {}) {
  std::vector<Descriptor33> out(cloud.size());
  Warnings local;
  for (std::uint32_t i = 0; i < cloud.size(); ++i) out[i] = spfh(i, cloud, index, radius, &local, cfg);
  if (!local.empty()) {
    warn(warnings, std::to_string(local.size()) + " isolated point(s) received zero descriptors");
  }
  return out;
}

namespace detail {

inline Descriptor33 combine_fpfh(std::uint32_t i, std::span<const Descriptor33> spfhs,
                                 const NeighborIndex& index, double radius) {
  Descriptor33 h = spfhs[i];
  const auto nbrs = index.radius_search(i, radius);
  if (nbrs.empty()) return h;
  Descriptor33 acc;
  for (const auto& nb : nbrs) {
    if (nb.dist2 == 0.0) continue;
    Descriptor33 q = spfhs[nb.index];
    q *= 1.0 / std::sqrt(nb.dist2);
    acc += q;
  }
  acc *= 1.0 / static_cast<double>(nbrs.size());
  h += acc;
  return h;
}

}  // namespace detail

/// H(p) = Ĥ(p) + (1/|N(p)|) Σ_{q∈N(p)} Ĥ(q) / ‖p − q‖, N(p) = {q : ‖p − q‖ < radius}.
inline Descriptor33 fpfh(std::uint32_t i, const PointCloud& cloud, const NeighborIndex& index,
                         double radius, Warnings* warnings = nullptr, const HistogramConfig& cfg = {}) {
  const auto nbrs = index.radius_search(i, radius);
  const Descriptor33 own = spfh(i, cloud, index, radius, warnings, cfg);
  if (nbrs.empty()) return own;
  Descriptor33 acc;
  for (const auto& nb : nbrs) {
    if (nb.dist2 == 0.0) continue;
    Descriptor33 q = spfh(nb.index, cloud, index, radius, nullptr, cfg);
    q *= 1.0 / std::sqrt(nb.dist2);
    acc += q;
  }
  acc *= 1.0 / static_cast<double>(nbrs.size());
  Descriptor33 h = own;
  h += acc;
  return h;
}

/// FPFH for every point, reusing one SPFH pass.
inline std::vector<Descriptor33> compute_fpfh_all(const PointCloud& cloud, const NeighborIndex& index,
                                                  double radius, Warnings* warnings = nullptr,
                                                  const HistogramConfig& cfg = {}) {
  const auto spfhs = compute_spfh_all(cloud, index, radius, warnings, cfg);
  std::vector<Descriptor33> out(cloud.size());
  for (std::uint32_t i = 0; i < cloud.size(); ++i) out[i] = detail::combine_fpfh(i, spfhs, index, radius);
  return out;
}

/// ½ Σ (a_i − b_i)² / (a_i + b_i), skipping empty bins.
inline double chi2_distance(const Descriptor33& a, const Descriptor33& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < kDescriptorSize; ++i) {
    const double s = a[i] + b[i];
    if (s == 0.0) continue;
    const double diff = a[i] - b[i];
    d += diff * diff / s;
  }
  return 0.5 * d;
}

/// Rescales a descriptor to total mass 1 (left untouched when empty).
inline Descriptor33 unit_mass(Descriptor33 h) {
  const double s = h.sum();
  if (s > 0.0) h *= 1.0 / s;
  return h;
}

}  // namespace salbench
