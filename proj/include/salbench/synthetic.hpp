#pragma once

#include <salbench/evaluation/metrics.hpp>
#include <salbench/geometry.hpp>
#include <salbench/random.hpp>

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

// Procedural test shapes: spheres, cubes and grids, optionally with planted
// features and simulated participant selections around them.

namespace salbench::synthetic {

inline TriangleMesh icosphere(int subdivisions, double radius = 1.0) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto& v : m.vertices) v.normalize();
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      if (auto it = mid.find(key); it != mid.end()) return it->second;
      const auto idx = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      const auto ab = midpoint(f[0], f[1]);
      const auto bc = midpoint(f[1], f[2]);
      const auto ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

/// Surface of the cube [-h, h]^3 with n x n quads per side (two triangles
/// each), outward-facing, with shared edge vertices.
inline TriangleMesh cube(int n, double half = 1.0) {
  TriangleMesh m;
  std::map<std::tuple<int, int, int>, std::uint32_t> ids;
  auto vertex = [&](int i, int j, int k) {
    const auto key = std::make_tuple(i, j, k);
    if (auto it = ids.find(key); it != ids.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(m.vertices.size());
    auto coord = [&](int c) { return half * (2.0 * c / n - 1.0); };
    m.vertices.emplace_back(coord(i), coord(j), coord(k));
    ids.emplace(key, idx);
    return idx;
  };
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const int fixed = side == 0 ? 0 : n;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          auto at = [&](int u, int v) {
            std::array<int, 3> c{};
            c[axis] = fixed;
            c[(axis + 1) % 3] = u;
            c[(axis + 2) % 3] = v;
            return vertex(c[0], c[1], c[2]);
          };
          const auto p00 = at(a, b), p10 = at(a + 1, b), p11 = at(a + 1, b + 1), p01 = at(a, b + 1);
          if (side == 1) {
            m.faces.push_back({p00, p10, p11});
            m.faces.push_back({p00, p11, p01});
          } else {
            m.faces.push_back({p00, p11, p10});
            m.faces.push_back({p00, p01, p11});
          }
        }
      }
    }
  }
  return m;
}

/// nx x ny vertices on the z = 0 plane, spacing `step`, row-major.
inline TriangleMesh plane_grid(int nx, int ny, double step = 1.0) {
  TriangleMesh m;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) m.vertices.emplace_back(x * step, y * step, 0.0);
  }
  for (int y = 0; y + 1 < ny; ++y) {
    for (int x = 0; x + 1 < nx; ++x) {
      const auto a = static_cast<std::uint32_t>(y * nx + x);
      const auto b = a + 1;
      const auto c = a + static_cast<std::uint32_t>(nx);
      const auto d = c + 1;
      m.faces.push_back({a, b, d});
      m.faces.push_back({a, d, c});
    }
  }
  return m;
}

/// A mesh with known salient spots.
struct PlantedShape {
  TriangleMesh mesh;
  std::vector<Vec3> features;  // feature centres on the surface
};

/// Unit sphere with Gaussian bumps of height `height` and angular width
/// `width` (radians) around the given unit directions.
inline PlantedShape bumped_sphere(int subdivisions, const std::vector<Vec3>& directions, double height = 0.3,
                                  double width = 0.15) {
  PlantedShape s;
  s.mesh = icosphere(subdivisions);
  for (auto& v : s.mesh.vertices) {
    double r = 1.0;
    for (const auto& d : directions) {
      const double ang = std::acos(std::clamp(v.dot(d.normalized()), -1.0, 1.0));
      r += height * std::exp(-ang * ang / (2.0 * width * width));
    }
    v *= r;
  }
  for (const auto& d : directions) s.features.push_back(d.normalized() * (1.0 + height));
  return s;
}

/// Cube [-1,1]^3 with conical dents of depth `depth` and radius `radius`
/// centred on the listed face centres (axis 0-2, side ±1).
inline PlantedShape dented_cube(int n, const std::vector<std::pair<int, int>>& faces, double depth = 0.4,
                                double radius = 0.45) {
  PlantedShape s;
  s.mesh = cube(n);
  for (const auto& [axis, side] : faces) {
    Vec3 centre = Vec3::Zero();
    centre[axis] = side > 0 ? 1.0 : -1.0;
    for (auto& v : s.mesh.vertices) {
      if (std::abs(v[axis] - centre[axis]) > 1e-12) continue;
      Vec3 off = v - centre;
      off[axis] = 0.0;
      const double d = off.norm();
      if (d < radius) v[axis] -= centre[axis] * depth * (1.0 - d / radius);
    }
    Vec3 bottom = centre;
    bottom[axis] -= centre[axis] * depth;
    s.features.push_back(bottom);
  }
  return s;
}

/// Simulated participants: each selects, for every feature, the vertex nearest
/// to a point jittered around the feature centre by up to `jitter`, plus
/// `stray` uniformly random vertices.
inline std::vector<std::vector<std::uint32_t>> plant_selections(const TriangleMesh& mesh,
                                                               const std::vector<Vec3>& features,
                                                               std::size_t participants, double jitter, Rng& rng,
                                                               std::size_t stray = 0) {
  std::vector<std::vector<std::uint32_t>> out(participants);
  const auto nv = mesh.vertices.size();
  for (auto& sel : out) {
    for (const auto& f : features) {
      const Vec3 target = f + jitter * Vec3(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0,
                                            2.0 * uniform01(rng) - 1.0);
      std::uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < nv; ++v) {
        const double d = (mesh.vertices[v] - target).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(v);
        }
      }
      sel.push_back(best);
    }
    for (std::size_t k = 0; k < stray; ++k) sel.push_back(static_cast<std::uint32_t>(uniform_below(rng, nv)));
    std::sort(sel.begin(), sel.end());
    sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
  }
  return out;
}

}  // namespace salbench::synthetic
