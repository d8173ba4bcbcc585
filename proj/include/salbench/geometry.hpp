#pragma once

#include <salbench/core.hpp>

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace salbench {

/// Link from a scan point back to the surface of its base mesh.
struct Provenance {
  std::uint32_t triangle = 0;
  std::array<double, 3> bary{1.0, 0.0, 0.0};
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;            // empty or same length as points
  std::vector<Provenance> provenance;   // empty or same length as points

  std::size_t size() const { return points.size(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_provenance() const { return !provenance.empty(); }
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;
  std::optional<std::string> class_label;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
};

/// Centre and radius used to express every model radius as a fraction of R.
struct ShapeScale {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Throws DataError when a face index is out of range or repeats a vertex.
inline void validate_mesh(const TriangleMesh& mesh) {
  const auto n = mesh.vertices.size();
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    for (auto idx : t) {
      if (idx >= n) {
        throw DataError("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                        " but mesh has " + std::to_string(n) + " vertices");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw DataError("face " + std::to_string(f) + " is degenerate (repeated vertex)");
    }
  }
}

/// Centroid-based enclosing sphere: centre is the centroid, radius the
/// largest distance from it.
inline ShapeScale bounding_sphere(std::span<const Vec3> points) {
  if (points.empty()) throw Error("empty point set");
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  ShapeScale s;
  s.center = sum / static_cast<double>(points.size());
  double r2 = 0.0;
  for (const auto& p : points) r2 = std::max(r2, (p - s.center).squaredNorm());
  s.radius = std::sqrt(r2);
  return s;
}

/// Maps a shape into its unit frame (centre at origin, bounding radius 1).
/// Degenerate shapes (R = 0) are only translated.
struct UnitFrame {
  ShapeScale scale;

  explicit UnitFrame(const ShapeScale& s) : scale(s) {}

  double factor() const { return scale.radius > 0.0 ? 1.0 / scale.radius : 1.0; }
  Vec3 to_unit(const Vec3& p) const { return (p - scale.center) * factor(); }

  std::vector<Vec3> to_unit(std::span<const Vec3> points) const {
    std::vector<Vec3> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(to_unit(p));
    return out;
  }
};

/// Area-weighted vertex normals. Vertices with no incident face get a zero vector.
inline std::vector<Vec3> vertex_normals(const TriangleMesh& mesh) {
  std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const Vec3 n = (b - a).cross(c - a);  // length is twice the area
    for (auto idx : f) normals[idx] += n;
  }
  for (auto& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

/// Vertex cloud of a mesh carrying its area-weighted normals.
inline PointCloud mesh_to_cloud(const TriangleMesh& mesh) {
  PointCloud cloud;
  cloud.points = mesh.vertices;
  cloud.normals = vertex_normals(mesh);
  return cloud;
}

}  // namespace salbench
