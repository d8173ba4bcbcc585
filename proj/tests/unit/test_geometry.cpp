#include "../support/oracles.hpp"

#include <salbench/geometry.hpp>
#include <salbench/neighbor_index.hpp>
#include <salbench/normals.hpp>
#include <salbench/synthetic.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace salbench;

TEST(BoundingSphere, CubeCorners) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const auto s = bounding_sphere(pts);
  EXPECT_NEAR((s.center - Vec3(0.5, 0.5, 0.5)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(s.radius, std::sqrt(0.75), 1e-15);
}

TEST(BoundingSphere, SinglePoint) {
  const std::vector<Vec3> pts{{1, 2, 3}};
  const auto s = bounding_sphere(pts);
  EXPECT_EQ(s.center, Vec3(1, 2, 3));
  EXPECT_EQ(s.radius, 0.0);
}

TEST(BoundingSphere, EmptyThrows) {
  EXPECT_THROW(bounding_sphere(std::vector<Vec3>{}), Error);
}

TEST(BoundingSphere, MatchesBruteForceMax) {
  std::mt19937_64 rng(3);
  const auto pts = oracle::random_points(rng, 100);
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= 100.0;
  double r = 0;
  for (const auto& p : pts) r = std::max(r, (p - c).norm());
  EXPECT_DOUBLE_EQ(bounding_sphere(pts).radius, r);
}

TEST(BoundingSphere, TranslationEquivariant) {
  std::mt19937_64 rng(4);
  auto pts = oracle::random_points(rng, 60);
  const auto a = bounding_sphere(pts);
  const Vec3 t(5, -2, 7);
  for (auto& p : pts) p += t;
  const auto b = bounding_sphere(pts);
  EXPECT_NEAR(a.radius, b.radius, 1e-12);
  EXPECT_NEAR((b.center - a.center - t).norm(), 0.0, 1e-12);
}

TEST(Mesh, ValidateRejectsOutOfRangeAndRepeatedIndices) {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.faces = {{0, 1, 2}};
  EXPECT_NO_THROW(validate_mesh(m));
  m.faces = {{0, 1, 3}};
  EXPECT_THROW(validate_mesh(m), DataError);
  m.faces = {{0, 1, 1}};
  EXPECT_THROW(validate_mesh(m), DataError);
}

TEST(Mesh, VertexNormalsPointOutwardOnSphere) {
  const auto m = synthetic::icosphere(2);
  const auto n = vertex_normals(m);
  for (std::size_t i = 0; i < n.size(); ++i) EXPECT_GT(n[i].dot(m.vertices[i]), 0.99);
}

TEST(NeighborIndex, CollinearRadiusQuery) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  const NeighborIndex idx(pts);
  const auto r = idx.radius_search(1u, 1.5);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].index, 0u);
  EXPECT_EQ(r[1].index, 2u);
}

TEST(NeighborIndex, RadiusIsStrict) {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}};
  const NeighborIndex idx(pts);
  EXPECT_TRUE(idx.radius_search(0u, 1.0).empty());
}

TEST(NeighborIndex, KnnAllOthers) {
  std::mt19937_64 rng(5);
  const auto pts = oracle::random_points(rng, 20);
  const NeighborIndex idx(pts);
  const auto r = idx.knn(3u, 19);
  ASSERT_EQ(r.size(), 19u);
  for (const auto& nb : r) EXPECT_NE(nb.index, 3u);
}

TEST(NeighborIndex, EmptyThrows) {
  EXPECT_THROW(NeighborIndex(std::vector<Vec3>{}), Error);
}

TEST(NeighborIndex, MatchesLinearScan) {
  std::mt19937_64 rng(6);
  const auto pts = oracle::random_points(rng, 500);
  const NeighborIndex idx(pts);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int q = 0; q < 50; ++q) {
    const Vec3 query(u(rng), u(rng), u(rng));
    const double r = 0.05 + 0.3 * u(rng);
    const auto got = idx.radius_search(query, r);
    const auto want = oracle::radius_scan(pts, query, r, NeighborIndex::kNone);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].index, want[i]);

    const std::size_t k = 1 + static_cast<std::size_t>(u(rng) * 30);
    const auto gk = idx.knn(query, k);
    const auto wk = oracle::knn_scan(pts, query, k, NeighborIndex::kNone);
    ASSERT_EQ(gk.size(), wk.size());
    for (std::size_t i = 0; i < gk.size(); ++i) EXPECT_EQ(gk[i].index, wk[i]);
  }
  for (std::uint32_t i = 0; i < 500; i += 7) {
    const auto got = idx.radius_search(i, 0.12);
    const auto want = oracle::radius_scan(pts, pts[i], 0.12, i);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k].index, want[k]);
  }
}

TEST(NeighborIndex, DuplicatePointsStillFound) {
  std::vector<Vec3> pts(30, Vec3(1, 1, 1));
  pts.emplace_back(2, 2, 2);
  const NeighborIndex idx(pts);
  EXPECT_EQ(idx.radius_search(0u, 0.1).size(), 29u);
  EXPECT_EQ(idx.knn(Vec3(2, 2, 2), 1)[0].index, 30u);
}

namespace {

PointCloud sphere_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PointCloud c;
  c.points = oracle::random_unit_vectors(rng, n);
  return c;
}

}  // namespace

TEST(Normals, PlaneGivesAxisNormals) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  for (int i = 0; i < 50; ++i) c.points.emplace_back(u(rng), u(rng), 0.0);
  const auto out = estimate_normals(c, 10);
  for (const auto& n : out.normals) EXPECT_NEAR(std::abs(n.z()), 1.0, 1e-6);
}

namespace {

PointCloud fibonacci_sphere(std::size_t n) {
  PointCloud c;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double r = std::sqrt(1.0 - z * z);
    c.points.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return c;
}

double radial_error_degrees(const Vec3& p, const Vec3& n) {
  return std::acos(std::min(1.0, std::abs(n.dot(p.normalized())))) * 180.0 / std::numbers::pi;
}

}  // namespace

TEST(Normals, SphereNormalsAreRadial) {
  const auto c = fibonacci_sphere(2000);
  const auto out = estimate_normals(c, 10);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT(radial_error_degrees(c.points[i], out.normals[i]), 5.0);
}

TEST(Normals, RandomSphereSamplesAreRadialOnAverage) {
  const auto c = sphere_samples(2000, 9);
  const auto out = estimate_normals(c, 10);
  double total = 0;
  for (std::size_t i = 0; i < c.size(); ++i) total += radial_error_degrees(c.points[i], out.normals[i]);
  EXPECT_LT(total / static_cast<double>(c.size()), 2.0);
}

TEST(Normals, InsufficientNeighborhood) {
  PointCloud c;
  c.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  EXPECT_THROW(estimate_normals(c, 5), Error);
  EXPECT_THROW(estimate_normals(c, 2), Error);
}

TEST(Normals, RotationEquivariant) {
  const auto c = sphere_samples(400, 10);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  PointCloud r = c;
  for (auto& p : r.points) p = rot * p;
  const auto a = estimate_normals(c, 10);
  const auto b = estimate_normals(r, 10);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(std::abs((rot * a.normals[i]).dot(b.normals[i])), 1.0, 1e-5);
}

TEST(Normals, CollinearNeighborhoodWarns) {
  PointCloud c;
  for (int i = 0; i < 12; ++i) c.points.emplace_back(i, 0, 0);
  Warnings w;
  const auto out = estimate_normals(c, 4, &w);
  EXPECT_FALSE(w.empty());
  for (const auto& n : out.normals) {
    EXPECT_NEAR(n.norm(), 1.0, 1e-9);
    EXPECT_NEAR(n.x(), 0.0, 1e-9);
  }
}

TEST(Orientation, SphereBecomesConsistentlyOutward) {
  auto c = estimate_normals(sphere_samples(1500, 11), 10);
  std::mt19937_64 rng(12);
  for (auto& n : c.normals) {
    if (rng() & 1) n = -n;
  }
  const auto out = orient_normals_mst(c, 8);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_GT(out.normals[i].dot(out.points[i]), 0.0);
}

TEST(Orientation, PlaneBecomesUniform) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  for (int i = 0; i < 200; ++i) {
    c.points.emplace_back(u(rng), u(rng), 0.0);
    c.normals.emplace_back(0, 0, (rng() & 1) ? 1.0 : -1.0);
  }
  const auto out = orient_normals_mst(c, 8);
  for (const auto& n : out.normals) EXPECT_EQ(n, out.normals[0]);
}

TEST(Orientation, TreeEdgesAgreeAndConsistentInputIsKept) {
  auto c = estimate_oriented_normals(sphere_samples(600, 14), NormalConfig{});
  std::vector<TreeEdge> tree;
  const auto again = orient_normals_mst(c, 8, &tree);
  EXPECT_EQ(tree.size(), c.size() - 1);
  for (const auto& e : tree) EXPECT_GE(again.normals[e.parent].dot(again.normals[e.child]), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(again.normals[i], c.normals[i]);
}

TEST(Orientation, MissingNormalsThrow) {
  PointCloud c;
  c.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  EXPECT_THROW(orient_normals_mst(c, 2), Error);
}

TEST(Orientation, DisconnectedComponentsSeededIndependently) {
  auto a = sphere_samples(300, 15);
  PointCloud c;
  for (const auto& p : a.points) c.points.push_back(p);
  for (const auto& p : a.points) c.points.push_back(p + Vec3(10, 0, 0));
  c = estimate_normals(c, 10);
  const auto out = orient_normals_mst(c, 8);
  for (std::size_t i = 0; i < 300; ++i) {
    EXPECT_GT(out.normals[i].dot(out.points[i]), 0.0);
    EXPECT_GT(out.normals[300 + i].dot(out.points[300 + i] - Vec3(10, 0, 0)), 0.0);
  }
}
