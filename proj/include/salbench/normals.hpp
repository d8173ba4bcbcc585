#pragma once

#include <salbench/geometry.hpp>
#include <salbench/neighbor_index.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

namespace salbench {

struct NormalConfig {
  std::size_t estimation_k = 10;  // neighbors used for the covariance
  std::size_t riemann_k = 8;      // neighbors per vertex in the orientation graph
};

namespace detail {

inline Vec3 any_orthogonal(const Vec3& d) {
  int axis = 0;
  d.cwiseAbs().minCoeff(&axis);
  return d.cross(Vec3::Unit(axis)).normalized();
}

}  // namespace detail

/// Unoriented normals from the smallest-eigenvalue eigenvector of the
/// covariance of each point and its k nearest neighbors.
inline PointCloud estimate_normals(const PointCloud& cloud, std::size_t k,
                                   Warnings* warnings = nullptr) {
  if (k < 3 || k >= cloud.size()) {
    throw Error("insufficient neighborhood: k = " + std::to_string(k) + " with " +
                std::to_string(cloud.size()) + " points");
  }
  const NeighborIndex index(cloud.points);
  PointCloud out = cloud;
  out.normals.assign(cloud.size(), Vec3::UnitZ());
  std::size_t degenerate = 0;

  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = index.knn(i, k);
    Vec3 mean = cloud.points[i];
    for (const auto& nb : nbrs) mean += cloud.points[nb.index];
    mean /= static_cast<double>(nbrs.size() + 1);

    Eigen::Matrix3d cov = (cloud.points[i] - mean) * (cloud.points[i] - mean).transpose();
    for (const auto& nb : nbrs) {
      const Vec3 d = cloud.points[nb.index] - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(nbrs.size() + 1);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Vec3 lambda = eig.eigenvalues();
    if (lambda[2] <= 0.0) {
      ++degenerate;  // coincident neighborhood
      continue;
    }
    if (lambda[1] <= 1e-12 * lambda[2]) {
      // Collinear neighborhood: any direction orthogonal to the line.
      out.normals[i] = detail::any_orthogonal(eig.eigenvectors().col(2));
      ++degenerate;
      continue;
    }
    out.normals[i] = eig.eigenvectors().col(0).normalized();
  }
  if (degenerate > 0) {
    warn(warnings, std::to_string(degenerate) + " point(s) had a degenerate normal neighborhood");
  }
  return out;
}

struct TreeEdge {
  std::uint32_t parent = 0;
  std::uint32_t child = 0;
};

/// Consistent normal orientation by propagation along a minimum spanning tree
/// of the k-NN Riemann graph, edge weight 1 − |n_i·n_j|.
///
/// Each connected component is seeded at its highest-z point, whose normal is
/// flipped to face away from the cloud centroid. A child normal is flipped
/// whenever its dot product with its parent's is negative. When `tree` is
/// non-null it receives the traversal edges in visiting order.
inline PointCloud orient_normals_mst(const PointCloud& cloud, std::size_t k,
                                     std::vector<TreeEdge>* tree = nullptr) {
  if (!cloud.has_normals() || cloud.normals.size() != cloud.size()) {
    throw Error("normal orientation requires normals");
  }
  PointCloud out = cloud;
  const auto n = static_cast<std::uint32_t>(cloud.size());
  if (tree != nullptr) tree->clear();
  if (n == 0) return out;

  std::vector<std::vector<std::uint32_t>> adjacency(n);
  if (n > 1) {
    const NeighborIndex index(cloud.points);
    const auto kk = std::min<std::size_t>(k, n - 1);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (const auto& nb : index.knn(i, kk)) {
        adjacency[i].push_back(nb.index);
        adjacency[nb.index].push_back(i);
      }
    }
    for (auto& a : adjacency) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
  }

  Vec3 centroid = Vec3::Zero();
  for (const auto& p : cloud.points) centroid += p;
  centroid /= static_cast<double>(n);

  std::vector<std::uint32_t> by_height(n);
  for (std::uint32_t i = 0; i < n; ++i) by_height[i] = i;
  std::stable_sort(by_height.begin(), by_height.end(), [&](std::uint32_t a, std::uint32_t b) {
    return cloud.points[a].z() > cloud.points[b].z();
  });

  std::vector<bool> visited(n, false);
  using Item = std::tuple<double, std::uint32_t, std::uint32_t>;  // weight, child, parent
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;

  auto push_edges = [&](std::uint32_t from) {
    for (auto to : adjacency[from]) {
      if (visited[to]) continue;
      const double w = 1.0 - std::abs(out.normals[from].dot(out.normals[to]));
      frontier.emplace(w, to, from);
    }
  };

  for (auto seed : by_height) {
    if (visited[seed]) continue;
    if (out.normals[seed].dot(cloud.points[seed] - centroid) < 0.0) out.normals[seed] = -out.normals[seed];
    visited[seed] = true;
    push_edges(seed);
    while (!frontier.empty()) {
      const auto [w, child, parent] = frontier.top();
      frontier.pop();
      if (visited[child]) continue;
      visited[child] = true;
      if (out.normals[parent].dot(out.normals[child]) < 0.0) out.normals[child] = -out.normals[child];
      if (tree != nullptr) tree->push_back(TreeEdge{parent, child});
      push_edges(child);
    }
  }
  return out;
}

/// Estimate then orient, the usual path for unoriented scans.
inline PointCloud estimate_oriented_normals(const PointCloud& cloud, const NormalConfig& config,
                                            Warnings* warnings = nullptr) {
  return orient_normals_mst(estimate_normals(cloud, config.estimation_k, warnings), config.riemann_k);
}

}  // namespace salbench
