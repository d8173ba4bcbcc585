#pragma once

#include <salbench/geometry.hpp>
#include <salbench/neighbor_index.hpp>
#include <salbench/normals.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

namespace salbench {

struct TriangulationConfig {
  std::size_t k = 12;   // neighborhood size
  double mu = 2.5;      // max edge length as a multiple of the nearest-neighbor distance
};

namespace detail {

struct Tangent2d {
  Vec3 origin, t1, t2;

  Tangent2d(const Vec3& o, const Vec3& n) : origin(o) {
    t1 = any_orthogonal(n);
    t2 = n.normalized().cross(t1);
  }
  Eigen::Vector2d operator()(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(t1), d.dot(t2)};
  }
};

inline double orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

inline bool segments_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                           const Eigen::Vector2d& d) {
  const double d1 = orient2d(a, b, c), d2 = orient2d(a, b, d);
  const double d3 = orient2d(c, d, a), d4 = orient2d(c, d, b);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;
inline EdgeKey edge_key(std::uint32_t a, std::uint32_t b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace detail

/// Greedy projection triangulation of an (open) scanned surface.
///
/// Every point's k-neighborhood is projected onto its tangent plane and the
/// Delaunay triangles incident to the point become candidates (edges longer
/// than mu times the point's nearest-neighbor distance are dropped).
/// Candidates are accepted shortest-first when they keep every edge shared
/// by at most two faces on opposite sides and cross no accepted edge.
/// Output vertices are the input points; the mesh may be open and disconnected.
inline TriangleMesh reconstruct_partial_mesh(const PointCloud& cloud, const TriangulationConfig& config = {},
                                             Warnings* warnings = nullptr) {
  const std::size_t n = cloud.size();
  if (n < 3) throw Error("triangulation needs at least 3 points");

  std::vector<Vec3> normals;
  if (cloud.has_normals() && cloud.normals.size() == n) {
    normals = cloud.normals;
  } else if (n > 3) {
    normals = estimate_normals(cloud, std::min<std::size_t>(10, n - 1), warnings).normals;
  } else {
    const Vec3 nrm = (cloud.points[1] - cloud.points[0]).cross(cloud.points[2] - cloud.points[0]);
    if (!(nrm.norm() > 0.0)) throw Error("triangulation of 3 collinear points");
    normals.assign(3, nrm.normalized());
  }

  const NeighborIndex index(cloud.points);
  const std::size_t k = std::min(config.k, n - 1);
  std::vector<std::vector<std::uint32_t>> hood(n);
  std::vector<double> nn_dist(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& nb : index.knn(i, k)) hood[i].push_back(nb.index);
    nn_dist[i] = std::sqrt(index.knn(i, 1).front().dist2);
  }

  struct Candidate {
    double max_edge;
    std::array<std::uint32_t, 3> tri;  // sorted
    std::uint32_t generator;
  };
  std::vector<Candidate> candidates;

  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& nb = hood[i];
    const detail::Tangent2d proj(cloud.points[i], normals[i]);
    std::vector<Eigen::Vector2d> local;
    local.reserve(nb.size());
    for (auto q : nb) local.push_back(proj(cloud.points[q]));
    const Eigen::Vector2d origin(0.0, 0.0);
    const double limit = config.mu * nn_dist[i];

    for (std::size_t a = 0; a < nb.size(); ++a) {
      if ((cloud.points[nb[a]] - cloud.points[i]).norm() > limit) continue;
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if ((cloud.points[nb[b]] - cloud.points[i]).norm() > limit) continue;
        const double e_ab = (cloud.points[nb[a]] - cloud.points[nb[b]]).norm();
        if (e_ab > limit) continue;
        const auto& pa = local[a];
        const auto& pb = local[b];
        const double area2 = detail::orient2d(origin, pa, pb);
        const double scale2 = std::max(pa.squaredNorm(), pb.squaredNorm());
        if (std::abs(area2) <= 1e-10 * scale2) continue;

        // Circumcircle of (origin, pa, pb).
        const double d = 2.0 * area2;
        const double ux = (pb.y() * pa.squaredNorm() - pa.y() * pb.squaredNorm()) / d;
        const double uy = (pa.x() * pb.squaredNorm() - pb.x() * pa.squaredNorm()) / d;
        const Eigen::Vector2d center(ux, uy);
        const double r2 = center.squaredNorm();
        bool empty = true;
        for (std::size_t c = 0; c < nb.size() && empty; ++c) {
          if (c == a || c == b) continue;
          if ((local[c] - center).squaredNorm() < r2 * (1.0 - 1e-9)) empty = false;
        }
        if (!empty) continue;

        std::array<std::uint32_t, 3> tri{i, nb[a], nb[b]};
        std::sort(tri.begin(), tri.end());
        const double max_edge = std::max({(cloud.points[nb[a]] - cloud.points[i]).norm(),
                                          (cloud.points[nb[b]] - cloud.points[i]).norm(), e_ab});
        candidates.push_back(Candidate{max_edge, tri, i});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.max_edge, x.tri, x.generator) < std::tie(y.max_edge, y.tri, y.generator);
  });

  TriangleMesh mesh;
  mesh.vertices = cloud.points;
  std::map<detail::EdgeKey, std::vector<std::uint32_t>> edge_faces;  // edge -> opposite vertices
  std::vector<std::vector<std::uint32_t>> adjacency(n);
  std::set<std::array<std::uint32_t, 3>> accepted;

  for (const auto& cand : candidates) {
    const auto& t = cand.tri;
    if (accepted.contains(t)) continue;
    const detail::Tangent2d proj(cloud.points[cand.generator], normals[cand.generator]);
    bool ok = true;

    for (int e = 0; e < 3 && ok; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3], c = t[(e + 2) % 3];
      const auto it = edge_faces.find(detail::edge_key(a, b));
      if (it == edge_faces.end()) continue;
      if (it->second.size() >= 2) {
        ok = false;
        break;
      }
      const auto pa = proj(cloud.points[a]), pb = proj(cloud.points[b]);
      const double s_new = detail::orient2d(pa, pb, proj(cloud.points[c]));
      const double s_old = detail::orient2d(pa, pb, proj(cloud.points[it->second.front()]));
      if (!((s_new > 0 && s_old < 0) || (s_new < 0 && s_old > 0))) ok = false;
    }
    if (!ok) continue;

    // Accepted edges around the candidate must not cross its edges.
    std::vector<std::uint32_t> local(hood[cand.generator]);
    local.push_back(cand.generator);
    for (auto v : t) local.insert(local.end(), hood[v].begin(), hood[v].end());
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    for (auto x : local) {
      for (auto y : adjacency[x]) {
        for (int e = 0; e < 3 && ok; ++e) {
          const auto a = t[e], b = t[(e + 1) % 3];
          if (x == a || x == b || y == a || y == b) continue;
          if (detail::segments_cross(proj(cloud.points[a]), proj(cloud.points[b]), proj(cloud.points[x]),
                                     proj(cloud.points[y]))) {
            ok = false;
          }
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (!ok) continue;

    for (int e = 0; e < 3; ++e) {
      const auto a = t[e], b = t[(e + 1) % 3], c = t[(e + 2) % 3];
      auto& faces = edge_faces[detail::edge_key(a, b)];
      if (faces.empty()) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
      }
      faces.push_back(c);
    }
    accepted.insert(t);

    std::array<std::uint32_t, 3> face = t;
    const Vec3 fn = (cloud.points[face[1]] - cloud.points[face[0]]).cross(cloud.points[face[2]] - cloud.points[face[0]]);
    if (fn.dot(normals[cand.generator]) < 0.0) std::swap(face[1], face[2]);
    mesh.faces.push_back(face);
  }
  return mesh;
}

}  // namespace salbench
