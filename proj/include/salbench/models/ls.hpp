#pragma once

#include <salbench/descriptor.hpp>
#include <salbench/models/prepare.hpp>
#include <salbench/random.hpp>
#include <salbench/saliency_map.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace salbench {

struct LsIntermediate {
  std::vector<double> d_low;
  std::vector<double> d_high;
  std::vector<double> a_low;      // rescaled to [0,1]
  std::vector<double> a_low_raw;  // before rescaling
  std::vector<std::uint32_t> foci;
};

struct DistinctivenessOptions {
  bool exact = true;
  std::size_t exact_limit = 5000;
  std::size_t sample_near = 512;
  std::size_t sample_far = 512;
  std::uint64_t seed = 0;
};

namespace detail {

inline double ls_dissimilarity(const Descriptor33& a, const Descriptor33& b, double dist, double radius) {
  return chi2_distance(a, b) / (1.0 + dist / radius);
}

}  // namespace detail

/// D(p_i) = 1 − exp(−mean_{j≠i} χ²(H_i, H_j) / (1 + ‖p_i − p_j‖/R)), not rescaled.
///
/// Exact O(n²) unless `options.exact` is false and n exceeds the limit, in
/// which case the mean runs over the nearest `sample_near` points plus
/// `sample_far` uniformly drawn others.
inline std::vector<double> ls_distinctiveness_raw(std::span<const Vec3> points,
                                                  std::span<const Descriptor33> descriptors, double radius,
                                                  const DistinctivenessOptions& options = {}) {
  const std::size_t n = points.size();
  if (descriptors.size() != n) throw Error("descriptor count does not match point count");
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  const double R = radius > 0.0 ? radius : 1.0;

  if (options.exact || n <= options.exact_limit) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        acc += detail::ls_dissimilarity(descriptors[i], descriptors[j], (points[i] - points[j]).norm(), R);
      }
      d[i] = 1.0 - std::exp(-acc / static_cast<double>(n - 1));
    }
    return d;
  }

  const NeighborIndex index(points);
  Rng rng(options.seed);
  std::vector<char> taken(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto near = index.knn(i, std::min(options.sample_near, n - 1));
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& nb : near) {
      taken[nb.index] = 1;
      acc += detail::ls_dissimilarity(descriptors[i], descriptors[nb.index], std::sqrt(nb.dist2), R);
      ++count;
    }
    const std::size_t far_pool = n - 1 - near.size();
    const std::size_t draws = std::min(options.sample_far, far_pool);
    for (std::size_t s = 0; s < draws; ++s) {
      std::uint32_t j = 0;
      do {
        j = static_cast<std::uint32_t>(uniform_below(rng, n));
      } while (j == i || taken[j]);
      acc += detail::ls_dissimilarity(descriptors[i], descriptors[j], (points[i] - points[j]).norm(), R);
      ++count;
    }
    for (const auto& nb : near) taken[nb.index] = 0;
    d[i] = count > 0 ? 1.0 - std::exp(-acc / static_cast<double>(count)) : 0.0;
  }
  return d;
}

/// Distinctiveness rescaled to [0,1].
inline std::vector<double> ls_distinctiveness(std::span<const Vec3> points,
                                              std::span<const Descriptor33> descriptors, double radius,
                                              const DistinctivenessOptions& options = {}) {
  return rescale_unit(ls_distinctiveness_raw(points, descriptors, radius, options));
}

/// Foci are the ceil(20%) most distinctive points (ties to the lower index).
/// Association: a(p) = exp(−‖p − f‖²/(2σ²)) · d_low(f), f the nearest focus.
inline LsIntermediate ls_foci_and_association(std::span<const Vec3> points, std::span<const double> d_low,
                                              double sigma) {
  const std::size_t n = points.size();
  if (d_low.size() != n) throw Error("distinctiveness length does not match point count");
  LsIntermediate out;
  out.d_low.assign(d_low.begin(), d_low.end());
  if (n == 0) return out;

  const auto focus_count = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(n)));
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return d_low[a] > d_low[b]; });
  out.foci.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(focus_count));
  std::sort(out.foci.begin(), out.foci.end());

  std::vector<Vec3> focus_points;
  focus_points.reserve(out.foci.size());
  for (auto f : out.foci) focus_points.push_back(points[f]);
  const NeighborIndex index(focus_points);
  const double inv = 1.0 / (2.0 * sigma * sigma);

  out.a_low_raw.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nearest = index.nearest(points[i]);
    out.a_low_raw[i] = std::exp(-nearest.dist2 * inv) * d_low[out.foci[nearest.index]];
  }
  out.a_low = rescale_unit(out.a_low_raw);
  return out;
}

/// S = ½(D_low + D_high) + ½ A_low, min-max normalised.
inline SaliencyMap compute_ls(const PointCloud& cloud, const ModelParams& params, std::string shape_id = {},
                              Warnings* warnings = nullptr, LsIntermediate* intermediate = nullptr) {
  params.validate();
  const PointCloud unit = prepare_cloud(cloud, params, warnings);
  const std::size_t n = unit.size();
  if (n < 2) return SaliencyMap{std::move(shape_id), ModelTag::LS, std::vector<double>(n, 0.0)};

  const NeighborIndex index(unit.points);
  auto descriptors_at = [&](double r) {
    auto h = compute_fpfh_all(unit, index, r, warnings);
    for (auto& d : h) d = unit_mass(d);
    return h;
  };
  DistinctivenessOptions opts;
  opts.exact = params.exact_ls;
  opts.exact_limit = params.ls_exact_limit;
  opts.sample_near = params.ls_sample_near;
  opts.sample_far = params.ls_sample_far;
  opts.seed = params.seed;

  const auto d_low = ls_distinctiveness(unit.points, descriptors_at(params.r_low), 1.0, opts);
  const auto d_high = ls_distinctiveness(unit.points, descriptors_at(params.r_high), 1.0, opts);
  auto inter = ls_foci_and_association(unit.points, d_low, params.ls_focus_sigma);
  inter.d_high = d_high;

  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 * (d_low[i] + d_high[i]) + 0.5 * inter.a_low[i];
  if (intermediate != nullptr) *intermediate = std::move(inter);
  return make_map(std::move(shape_id), ModelTag::LS, s);
}

}  // namespace salbench
