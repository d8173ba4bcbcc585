#pragma once

#include <salbench/geometry.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace salbench {

struct ScanConfig {
  int image_width = 256;
  int image_height = 256;
  double fov_degrees = 45.0;       // vertical field of view
  double icosahedron_scale = 2.5;  // camera distance as a multiple of R

  void validate() const {
    if (image_width < 16 || image_height < 16) throw Error("scan image must be at least 16x16 pixels");
    if (!(fov_degrees >= 10.0 && fov_degrees <= 120.0)) throw Error("fov_degrees must be within [10, 120]");
    if (!(icosahedron_scale > 1.0)) throw Error("icosahedron_scale must be > 1");
  }
};

struct CameraPose {
  Vec3 position = Vec3::Zero();
  Vec3 look_at = Vec3::Zero();

  Vec3 direction() const { return (look_at - position).normalized(); }
};

struct RangeScan {
  PointCloud cloud;  // carries provenance for every point
  CameraPose camera;
  std::string base_shape_id;
  std::size_t view_index = 0;
};

/// Vertices of a regular icosahedron (unit circumradius), in a fixed order.
inline std::array<Vec3, 12> icosahedron_vertices() {
  const double phi = std::numbers::phi;
  std::array<Vec3, 12> v{
      Vec3(-1, phi, 0), Vec3(1, phi, 0), Vec3(-1, -phi, 0), Vec3(1, -phi, 0),
      Vec3(0, -1, phi), Vec3(0, 1, phi), Vec3(0, -1, -phi), Vec3(0, 1, -phi),
      Vec3(phi, 0, -1), Vec3(phi, 0, 1), Vec3(-phi, 0, -1), Vec3(-phi, 0, 1),
  };
  for (auto& p : v) p.normalize();
  return v;
}

/// Twelve cameras on the vertices of a regular icosahedron of circumradius
/// icosahedron_scale · R around the shape, each looking at its centre.
inline std::array<CameraPose, 12> icosahedron_cameras(const ShapeScale& scale, const ScanConfig& config) {
  if (!(scale.radius > 0.0)) throw Error("camera placement needs a shape with R > 0");
  std::array<CameraPose, 12> poses;
  const auto dirs = icosahedron_vertices();
  for (std::size_t i = 0; i < 12; ++i) {
    poses[i].position = scale.center + dirs[i] * (config.icosahedron_scale * scale.radius);
    poses[i].look_at = scale.center;
  }
  return poses;
}

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  std::uint32_t triangle = std::numeric_limits<std::uint32_t>::max();
  double u = 0.0, v = 0.0;  // weights of the second and third triangle vertex

  bool valid() const { return std::isfinite(t); }
};

/// Bounding volume hierarchy over mesh triangles for nearest-hit queries.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriangleMesh& mesh) : mesh_(&mesh) {
    const auto m = mesh.faces.size();
    order_.resize(m);
    centroids_.resize(m);
    for (std::uint32_t f = 0; f < m; ++f) {
      order_[f] = f;
      const auto& t = mesh.faces[f];
      centroids_[f] = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
    }
    if (m > 0) build(0, static_cast<std::uint32_t>(m));
  }

  /// Nearest intersection with t > t_min; equal distances resolve to the lowest triangle index.
  RayHit intersect(const Vec3& origin, const Vec3& dir, double t_min = 1e-12) const {
    RayHit best;
    if (nodes_.empty()) return best;
    const Vec3 inv(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (!hits_box(node, origin, inv, best.t)) continue;
      if (node.count > 0) {
        for (auto i = node.first; i < node.first + node.count; ++i) test_triangle(order_[i], origin, dir, t_min, best);
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
    return best;
  }

 private:
  struct Node {
    Vec3 lo, hi;
    std::uint32_t left = 0, right = 0;
    std::uint32_t first = 0, count = 0;  // count > 0 marks a leaf
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    Node node;
    node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    node.hi = -node.lo;
    Vec3 clo = node.lo, chi = node.hi;
    for (auto i = begin; i < end; ++i) {
      for (auto v : mesh_->faces[order_[i]]) {
        node.lo = node.lo.cwiseMin(mesh_->vertices[v]);
        node.hi = node.hi.cwiseMax(mesh_->vertices[v]);
      }
      clo = clo.cwiseMin(centroids_[order_[i]]);
      chi = chi.cwiseMax(centroids_[order_[i]]);
    }
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(node);
    int axis = 0;
    (chi - clo).maxCoeff(&axis);
    if (end - begin <= 4 || chi[axis] - clo[axis] <= 0.0) {
      nodes_[id].first = begin;
      nodes_[id].count = end - begin;
      return id;
    }
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return centroids_[a][axis] < centroids_[b][axis] ||
                              (centroids_[a][axis] == centroids_[b][axis] && a < b);
                     });
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  static bool hits_box(const Node& node, const Vec3& o, const Vec3& inv, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int a = 0; a < 3; ++a) {
      double ta = (node.lo[a] - o[a]) * inv[a];
      double tb = (node.hi[a] - o[a]) * inv[a];
      if (std::isnan(ta) || std::isnan(tb)) {  // ray parallel to and on a slab plane
        if (o[a] < node.lo[a] || o[a] > node.hi[a]) return false;
        continue;
      }
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb * (1.0 + 4 * std::numeric_limits<double>::epsilon()));
      if (t0 > t1) return false;
    }
    return true;
  }

  void test_triangle(std::uint32_t f, const Vec3& o, const Vec3& d, double t_min, RayHit& best) const {
    const auto& tri = mesh_->faces[f];
    const Vec3& v0 = mesh_->vertices[tri[0]];
    const Vec3 e1 = mesh_->vertices[tri[1]] - v0;
    const Vec3 e2 = mesh_->vertices[tri[2]] - v0;
    const Vec3 p = d.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-300) return;
    const double inv_det = 1.0 / det;
    const Vec3 s = o - v0;
    const double u = s.dot(p) * inv_det;
    constexpr double tol = 1e-12;
    if (u < -tol || u > 1.0 + tol) return;
    const Vec3 q = s.cross(e1);
    const double v = d.dot(q) * inv_det;
    if (v < -tol || u + v > 1.0 + tol) return;
    const double t = e2.dot(q) * inv_det;
    if (t <= t_min) return;
    if (t < best.t || (t == best.t && f < best.triangle)) {
      best.t = t;
      best.triangle = f;
      best.u = u;
      best.v = v;
    }
  }

  const TriangleMesh* mesh_;
  std::vector<std::uint32_t> order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

/// Barycentric weights clamped to the triangle and renormalised.
inline std::array<double, 3> clamp_barycentric(double u, double v) {
  std::array<double, 3> b{1.0 - u - v, u, v};
  double s = 0.0;
  for (auto& x : b) {
    x = std::max(0.0, x);
    s += x;
  }
  for (auto& x : b) x /= s;
  return b;
}

inline Vec3 barycentric_point(const TriangleMesh& mesh, const Provenance& prov) {
  const auto& t = mesh.faces[prov.triangle];
  return prov.bary[0] * mesh.vertices[t[0]] + prov.bary[1] * mesh.vertices[t[1]] +
         prov.bary[2] * mesh.vertices[t[2]];
}

/// Ray casts one pixel-centre ray per pixel through a perspective frustum.
/// Points are emitted in row-major pixel order, in the mesh's own coordinates.
inline RangeScan render_scan(const TriangleMesh& mesh, const CameraPose& camera, const ScanConfig& config,
                             Warnings* warnings = nullptr, const TriangleBvh* bvh = nullptr) {
  config.validate();
  if (mesh.vertices.empty() || mesh.faces.empty()) throw Error("cannot scan an empty mesh");
  std::optional<TriangleBvh> own;
  if (bvh == nullptr) bvh = &own.emplace(mesh);

  const Vec3 forward = camera.direction();
  Vec3 up_hint = Vec3::UnitZ();
  if (std::abs(forward.dot(up_hint)) > std::cos(std::numbers::pi / 180.0)) up_hint = Vec3::UnitX();
  const Vec3 right = forward.cross(up_hint).normalized();
  const Vec3 up = right.cross(forward);
  const double half_h = std::tan(0.5 * config.fov_degrees * std::numbers::pi / 180.0);
  const double half_w = half_h * static_cast<double>(config.image_width) / static_cast<double>(config.image_height);

  RangeScan scan;
  scan.camera = camera;
  for (int py = 0; py < config.image_height; ++py) {
    const double y = (1.0 - 2.0 * (py + 0.5) / config.image_height) * half_h;
    for (int px = 0; px < config.image_width; ++px) {
      const double x = (2.0 * (px + 0.5) / config.image_width - 1.0) * half_w;
      const Vec3 dir = (forward + x * right + y * up).normalized();
      const RayHit hit = bvh->intersect(camera.position, dir);
      if (!hit.valid()) continue;
      Provenance prov{hit.triangle, clamp_barycentric(hit.u, hit.v)};
      scan.cloud.points.push_back(barycentric_point(mesh, prov));
      scan.cloud.provenance.push_back(prov);
    }
  }
  if (scan.cloud.points.empty()) warn(warnings, "scan produced no points: mesh outside the view frustum");
  return scan;
}

/// Barycentric interpolation of a per-vertex field onto scan points.
inline std::vector<double> transfer_ground_truth(std::span<const double> field, const RangeScan& scan,
                                                 const TriangleMesh& base) {
  if (field.size() != base.vertices.size()) {
    throw DataError("ground-truth length " + std::to_string(field.size()) + " does not match " +
                    std::to_string(base.vertices.size()) + " base vertices");
  }
  if (scan.cloud.provenance.size() != scan.cloud.size()) throw Error("scan points are missing provenance");
  std::vector<double> out(scan.cloud.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& prov = scan.cloud.provenance[i];
    if (prov.triangle >= base.faces.size()) throw DataError("scan provenance references a missing triangle");
    const auto& t = base.faces[prov.triangle];
    out[i] = prov.bary[0] * field[t[0]] + prov.bary[1] * field[t[1]] + prov.bary[2] * field[t[2]];
  }
  return out;
}

}  // namespace salbench
