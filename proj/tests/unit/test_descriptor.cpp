#include "../support/oracles.hpp"

#include <salbench/descriptor.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace salbench;

namespace {

PointCloud random_cloud(std::mt19937_64& rng, std::size_t n) {
  PointCloud c;
  c.points = oracle::random_points(rng, n);
  c.normals = oracle::random_unit_vectors(rng, n);
  return c;
}

void expect_hist_eq(const Descriptor33& got, const oracle::Hist& want, double tol) {
  for (std::size_t k = 0; k < kDescriptorSize; ++k) EXPECT_NEAR(got[k], want[k], tol) << "bin " << k;
}

}  // namespace

TEST(Darboux, AlignedNormalsGiveZero) {
  const auto t = darboux_angles({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {0, 0, 1});
  EXPECT_NEAR(t.alpha, 0.0, 1e-15);
  EXPECT_NEAR(t.phi, 0.0, 1e-15);
  EXPECT_NEAR(t.theta, 0.0, 1e-15);
}

TEST(Darboux, QuarterTurn) {
  const auto t = darboux_angles({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 0, 0});
  EXPECT_NEAR(t.alpha, 0.0, 1e-15);
  EXPECT_NEAR(t.phi, 0.0, 1e-15);
  EXPECT_NEAR(t.theta, std::numbers::pi / 2, 1e-15);
}

TEST(Darboux, MatchesDirectFormula) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 1000; ++k) {
    const auto p = oracle::random_points(rng, 2, -1, 1);
    const auto n = oracle::random_unit_vectors(rng, 2);
    const auto got = darboux_angles(p[0], n[0], p[1], n[1]);
    const auto want = oracle::darboux(p[0], n[0], p[1], n[1]);
    EXPECT_NEAR(got.alpha, want.alpha, 1e-12);
    EXPECT_NEAR(got.phi, want.phi, 1e-12);
    EXPECT_NEAR(got.theta, want.theta, 1e-12);
    EXPECT_LE(got.alpha, 1.0);
    EXPECT_LE(got.phi, 1.0);
    EXPECT_LE(got.theta, std::numbers::pi);
  }
}

TEST(Darboux, CoincidentPointsThrow) {
  EXPECT_THROW(darboux_angles({1, 1, 1}, {0, 0, 1}, {1, 1, 1}, {0, 0, 1}), Error);
}

TEST(Darboux, NormalAlongBaselineIsFinite) {
  const auto t = darboux_angles({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0});
  EXPECT_TRUE(std::isfinite(t.alpha) && std::isfinite(t.phi) && std::isfinite(t.theta));
  EXPECT_NEAR(t.phi, 1.0, 1e-9);
}

TEST(Spfh, PlanarCloudConcentratesInFirstBins) {
  PointCloud c;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      c.points.emplace_back(0.1 * i, 0.1 * j, 0.0);
      c.normals.emplace_back(0, 0, 1);
    }
  }
  const NeighborIndex idx(c.points);
  const auto all = compute_spfh_all(c, idx, 0.25);
  for (const auto& h : all) {
    EXPECT_EQ(h, all[0]);
    EXPECT_DOUBLE_EQ(h[0], 100.0);
    EXPECT_DOUBLE_EQ(h[11], 100.0);
    EXPECT_DOUBLE_EQ(h[22], 100.0);
  }
  const auto f = compute_fpfh_all(c, idx, 0.25);
  const auto shape0 = unit_mass(f[0]);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto shape = unit_mass(f[i]);
    for (std::size_t b = 0; b < kDescriptorSize; ++b) EXPECT_NEAR(shape[b], shape0[b], 1e-12);
  }
}

TEST(Spfh, IsolatedPointIsZeroWithWarning) {
  PointCloud c;
  c.points = {{0, 0, 0}, {0.01, 0, 0}, {5, 5, 5}};
  c.normals.assign(3, Vec3::UnitZ());
  const NeighborIndex idx(c.points);
  Warnings w;
  const auto h = spfh(2, c, idx, 0.1, &w);
  EXPECT_TRUE(h.is_zero());
  EXPECT_EQ(w.size(), 1u);
}

TEST(Spfh, RequiresNormals) {
  PointCloud c;
  c.points = {{0, 0, 0}, {0.01, 0, 0}};
  const NeighborIndex idx(c.points);
  EXPECT_THROW(spfh(0, c, idx, 0.1), Error);
}

TEST(Spfh, MatchesPairwiseLoop) {
  std::mt19937_64 rng(22);
  const auto c = random_cloud(rng, 10);
  const NeighborIndex idx(c.points);
  for (std::uint32_t i = 0; i < 10; ++i) expect_hist_eq(spfh(i, c, idx, 0.6), oracle::spfh(i, c.points, c.normals, 0.6), 1e-9);
}

TEST(Fpfh, TwoPointFormula) {
  PointCloud c;
  c.points = {{0, 0, 0}, {0.3, 0, 0}};
  c.normals = {Vec3(0, 0, 1), Vec3(0, 1, 1).normalized()};
  const NeighborIndex idx(c.points);
  const auto h1 = spfh(0, c, idx, 1.0);
  const auto h2 = spfh(1, c, idx, 1.0);
  const auto f = fpfh(0, c, idx, 1.0);
  for (std::size_t k = 0; k < kDescriptorSize; ++k) EXPECT_NEAR(f[k], h1[k] + h2[k] / 0.3, 1e-12);
}

TEST(Fpfh, MatchesFormulaOnRandomClouds) {
  std::mt19937_64 rng(23);
  const auto c = random_cloud(rng, 50);
  const NeighborIndex idx(c.points);
  const auto all = compute_fpfh_all(c, idx, 0.35);
  for (std::uint32_t i = 0; i < 50; ++i) {
    const auto want = oracle::fpfh(i, c.points, c.normals, 0.35);
    expect_hist_eq(fpfh(i, c, idx, 0.35), want, 1e-9);
    expect_hist_eq(all[i], want, 1e-9);
  }
}

TEST(Fpfh, RigidMotionInvariant) {
  std::mt19937_64 rng(24);
  const auto c = random_cloud(rng, 60);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(1.1, Vec3(0.3, -1, 0.5).normalized()).toRotationMatrix();
  PointCloud moved = c;
  for (auto& p : moved.points) p = rot * p + Vec3(3, -4, 1);
  for (auto& n : moved.normals) n = rot * n;
  const auto a = compute_fpfh_all(c, NeighborIndex(c.points), 0.4);
  const auto b = compute_fpfh_all(moved, NeighborIndex(moved.points), 0.4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < kDescriptorSize; ++k) EXPECT_NEAR(a[i][k], b[i][k], 1e-4);
  }
}

TEST(Chi2, BasicValues) {
  Descriptor33 a, b;
  EXPECT_EQ(chi2_distance(a, b), 0.0);
  a[0] = 1.0;
  b[1] = 1.0;
  EXPECT_DOUBLE_EQ(chi2_distance(a, b), 1.0);
  EXPECT_EQ(chi2_distance(a, a), 0.0);
}

TEST(Chi2, SymmetricAndMatchesOracle) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    Descriptor33 a, b;
    oracle::Hist ha{}, hb{};
    for (std::size_t k = 0; k < kDescriptorSize; ++k) {
      ha[k] = a[k] = (rng() % 4 == 0) ? 0.0 : u(rng);
      hb[k] = b[k] = (rng() % 4 == 0) ? 0.0 : u(rng);
    }
    EXPECT_EQ(chi2_distance(a, b), chi2_distance(b, a));
    EXPECT_NEAR(chi2_distance(a, b), oracle::chi2(ha, hb), 1e-12);
    EXPECT_GT(chi2_distance(a, b), 0.0);
  }
}

TEST(UnitMass, SumsToOne) {
  Descriptor33 a;
  a[3] = 2;
  a[20] = 6;
  const auto m = unit_mass(a);
  EXPECT_DOUBLE_EQ(m.sum(), 1.0);
  EXPECT_DOUBLE_EQ(m[20], 0.75);
  EXPECT_TRUE(unit_mass(Descriptor33{}).is_zero());
}
