#pragma once

#include <salbench/geometry.hpp>
#include <salbench/normals.hpp>
#include <salbench/saliency_map.hpp>

#include <cmath>

namespace salbench {

/// Cloud moved into its unit frame (centroid at origin, R = 1), with oriented
/// normals. Existing normals are kept when every one of them is unit length;
/// otherwise they are estimated and oriented.
inline PointCloud prepare_cloud(const PointCloud& cloud, const ModelParams& params,
                                Warnings* warnings = nullptr) {
  if (cloud.size() == 0) throw Error("empty point set");
  const UnitFrame frame(bounding_sphere(cloud.points));
  PointCloud out;
  out.points = frame.to_unit(cloud.points);
  out.provenance = cloud.provenance;

  bool usable = cloud.has_normals() && cloud.normals.size() == cloud.size();
  if (usable) {
    for (const auto& n : cloud.normals) {
      if (std::abs(n.norm() - 1.0) > 1e-6) {
        usable = false;
        break;
      }
    }
  }
  if (usable) {
    out.normals = cloud.normals;
    return out;
  }
  if (cloud.size() <= 3) {
    // Too few points for a covariance; any consistent normal will do.
    out.normals.assign(cloud.size(), Vec3::UnitZ());
    return out;
  }
  NormalConfig nc;
  nc.estimation_k = std::min(params.normal_k, cloud.size() - 1);
  nc.riemann_k = params.riemann_k;
  return estimate_oriented_normals(out, nc, warnings);
}

}  // namespace salbench
