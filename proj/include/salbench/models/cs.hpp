#pragma once

#include <salbench/descriptor.hpp>
#include <salbench/models/prepare.hpp>
#include <salbench/random.hpp>
#include <salbench/saliency_map.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace salbench {

struct Clustering {
  std::vector<std::uint32_t> assignment;  // cluster of each point
  std::vector<Vec3> centroids;
  std::vector<std::size_t> sizes;
};

/// Lloyd's k-means with k-means++ seeding. Every cluster ends non-empty:
/// an emptied cluster is re-seeded at the point farthest from its centroid.
inline Clustering kmeans(std::span<const Vec3> points, std::size_t k, std::size_t max_iterations,
                         std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k == 0) throw Error("k-means needs at least one cluster");
  if (k > n) throw Error("too many clusters: K = " + std::to_string(k) + " > " + std::to_string(n) + " points");

  Rng rng(seed);
  Clustering c;
  c.centroids.reserve(k);
  c.centroids.push_back(points[uniform_below(rng, n)]);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (c.centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (points[i] - c.centroids.back()).squaredNorm());
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = uniform01(rng) * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        target -= d2[pick];
        if (target < 0.0 && d2[pick] > 0.0) break;
      }
    } else {
      pick = c.centroids.size();  // all coincident: any distinct index works
    }
    c.centroids.push_back(points[pick]);
  }

  c.assignment.assign(n, 0);
  for (std::size_t iter = 0; iter <= max_iterations; ++iter) {
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = (points[i] - c.centroids[j]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(j);
        }
      }
      if (c.assignment[i] != best) {
        c.assignment[i] = best;
        changed = true;
      }
    }

    c.sizes.assign(k, 0);
    for (auto a : c.assignment) ++c.sizes[a];
    for (std::size_t j = 0; j < k; ++j) {
      if (c.sizes[j] > 0) continue;
      // Steal the point farthest from its own centroid among clusters of size > 1.
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (c.sizes[c.assignment[i]] < 2) continue;
        const double d = (points[i] - c.centroids[c.assignment[i]]).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --c.sizes[c.assignment[far]];
      c.assignment[far] = static_cast<std::uint32_t>(j);
      c.sizes[j] = 1;
      changed = true;
    }

    std::vector<Vec3> sums(k, Vec3::Zero());
    for (std::size_t i = 0; i < n; ++i) sums[c.assignment[i]] += points[i];
    for (std::size_t j = 0; j < k; ++j) c.centroids[j] = sums[j] / static_cast<double>(c.sizes[j]);
    if (!changed) break;
  }
  return c;
}

/// D_i = 1 − exp(−mean_{j≠i} χ²(F_i, F_j) / (1 + ‖c_i − c_j‖/R)), not rescaled.
inline std::vector<double> cluster_distinctiveness(std::span<const Descriptor33> descriptors,
                                                   std::span<const Vec3> centroids, double radius) {
  const std::size_t k = descriptors.size();
  std::vector<double> d(k, 0.0);
  if (k < 2) return d;
  for (std::size_t i = 0; i < k; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      acc += chi2_distance(descriptors[i], descriptors[j]) / (1.0 + (centroids[i] - centroids[j]).norm() / radius);
    }
    d[i] = 1.0 - std::exp(-acc / static_cast<double>(k - 1));
  }
  return d;
}

/// Similarity bandwidth: median of the pairwise cluster χ² distances
/// (falling back to the maximum, then 1, when that is zero).
inline double chi2_bandwidth(std::span<const Descriptor33> descriptors) {
  std::vector<double> all;
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    for (std::size_t j = i + 1; j < descriptors.size(); ++j) all.push_back(chi2_distance(descriptors[i], descriptors[j]));
  }
  if (all.empty()) return 1.0;
  std::sort(all.begin(), all.end());
  const std::size_t m = all.size();
  const double median = m % 2 == 1 ? all[m / 2] : 0.5 * (all[m / 2 - 1] + all[m / 2]);
  if (median > 0.0) return median;
  return all.back() > 0.0 ? all.back() : 1.0;
}

/// 1 − rescaled spatial variance of geometrically similar clusters, with
/// similarity w_ij = exp(−χ²(F_i, F_j)/σ_χ).
inline std::vector<double> cluster_spatial_distribution(std::span<const Descriptor33> descriptors,
                                                        std::span<const Vec3> centroids, double sigma_chi) {
  const std::size_t k = descriptors.size();
  std::vector<double> variance(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double wsum = 0.0;
    Vec3 mean = Vec3::Zero();
    std::vector<double> w(k);
    for (std::size_t j = 0; j < k; ++j) {
      w[j] = std::exp(-chi2_distance(descriptors[i], descriptors[j]) / sigma_chi);
      wsum += w[j];
      mean += w[j] * centroids[j];
    }
    mean /= wsum;
    double var = 0.0;
    for (std::size_t j = 0; j < k; ++j) var += w[j] * (centroids[j] - mean).squaredNorm();
    variance[i] = var / wsum;
  }
  auto out = rescale_unit(variance);
  for (auto& v : out) v = 1.0 - v;
  return out;
}

struct CsIntermediate {
  Clustering clustering;
  std::vector<Descriptor33> cluster_descriptors;
  std::vector<double> distinctiveness;       // raw
  std::vector<double> spatial_distribution;  // in [0,1]
  std::vector<double> cluster_saliency;      // in [0,1]
};

/// Gaussian-weighted average of cluster saliencies around every point.
inline std::vector<double> smooth_cluster_saliency(std::span<const Vec3> points, std::span<const Vec3> centroids,
                                                   std::span<const double> cluster_saliency, double sigma) {
  std::vector<double> out(points.size(), 0.0);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> d2(centroids.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      d2[j] = (points[i] - centroids[j]).squaredNorm();
      dmin = std::min(dmin, d2[j]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      const double w = std::exp(-(d2[j] - dmin) * inv);  // shifted so the nearest weight is 1
      num += w * cluster_saliency[j];
      den += w;
    }
    out[i] = num / den;
  }
  return out;
}

/// Cluster-based saliency: cluster distinctiveness plus spatial distribution,
/// smoothed back onto the points.
inline SaliencyMap compute_cs(const PointCloud& cloud, const ModelParams& params, std::string shape_id = {},
                              Warnings* warnings = nullptr, CsIntermediate* intermediate = nullptr) {
  params.validate();
  if (params.clusters > cloud.size()) {
    throw Error("too many clusters: K = " + std::to_string(params.clusters) + " > " +
                std::to_string(cloud.size()) + " points");
  }
  const PointCloud unit = prepare_cloud(cloud, params, warnings);
  const std::size_t n = unit.size();
  CsIntermediate inter;
  inter.clustering = kmeans(unit.points, params.clusters, params.kmeans_iterations, params.seed);
  const std::size_t k = params.clusters;

  const NeighborIndex index(unit.points);
  const auto fpfh_all = compute_fpfh_all(unit, index, params.r_cs, warnings);
  inter.cluster_descriptors.assign(k, Descriptor33{});
  for (std::size_t i = 0; i < n; ++i) inter.cluster_descriptors[inter.clustering.assignment[i]] += fpfh_all[i];
  for (std::size_t j = 0; j < k; ++j) {
    inter.cluster_descriptors[j] *= 1.0 / static_cast<double>(inter.clustering.sizes[j]);
    inter.cluster_descriptors[j] = unit_mass(inter.cluster_descriptors[j]);
  }

  inter.distinctiveness = cluster_distinctiveness(inter.cluster_descriptors, inter.clustering.centroids, 1.0);
  inter.spatial_distribution = cluster_spatial_distribution(
      inter.cluster_descriptors, inter.clustering.centroids, chi2_bandwidth(inter.cluster_descriptors));
  const auto d = rescale_unit(inter.distinctiveness);
  std::vector<double> combined(k);
  for (std::size_t j = 0; j < k; ++j) combined[j] = k > 1 ? d[j] + inter.spatial_distribution[j] : 0.0;
  inter.cluster_saliency = rescale_unit(combined);

  const auto point_saliency =
      smooth_cluster_saliency(unit.points, inter.clustering.centroids, inter.cluster_saliency, params.cs_sigma);
  if (intermediate != nullptr) *intermediate = std::move(inter);
  return make_map(std::move(shape_id), ModelTag::CS, point_saliency);
}

}  // namespace salbench
