#pragma once

#include <salbench/geometry.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace salbench {

/// Cotangent stiffness matrix L (positive semi-definite, rows sum to zero)
/// and lumped (one third of incident area) vertex masses.
struct CotangentLaplacian {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
};

/// Returns nullopt for a zero-area face or a vertex with no incident face.
inline std::optional<CotangentLaplacian> cotangent_laplacian(const TriangleMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.faces.size() * 12);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);

  for (const auto& f : mesh.faces) {
    const Vec3& p0 = mesh.vertices[f[0]];
    const Vec3& p1 = mesh.vertices[f[1]];
    const Vec3& p2 = mesh.vertices[f[2]];
    const double double_area = (p1 - p0).cross(p2 - p0).norm();
    if (!(double_area > 0.0) || !std::isfinite(double_area)) return std::nullopt;
    for (int c = 0; c < 3; ++c) {
      const auto i = f[(c + 1) % 3];
      const auto j = f[(c + 2) % 3];
      const Vec3 a = mesh.vertices[i] - mesh.vertices[f[c]];
      const Vec3 b = mesh.vertices[j] - mesh.vertices[f[c]];
      const double w = 0.5 * a.dot(b) / double_area;  // ½ cot of the angle at f[c]
      triplets.emplace_back(i, j, -w);
      triplets.emplace_back(j, i, -w);
      triplets.emplace_back(i, i, w);
      triplets.emplace_back(j, j, w);
      mass(f[c]) += double_area / 6.0;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(mass(i) > 0.0)) return std::nullopt;
  }
  CotangentLaplacian out;
  out.stiffness.resize(n, n);
  out.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  out.mass = std::move(mass);
  return out;
}

/// Symmetric operator M^{-1/2} L M^{-1/2}; its eigenvectors are orthonormal
/// in the Euclidean sense and its eigenvalues are those of M⁻¹L.
inline Eigen::SparseMatrix<double> symmetric_laplacian(const CotangentLaplacian& lap) {
  const Eigen::VectorXd s = lap.mass.cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * lap.stiffness * s.asDiagonal();
}

struct Eigenpairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // one column per value
};

/// The `count` smallest eigenpairs of a symmetric positive semi-definite
/// matrix. Small problems use a dense solver; larger ones use shift-inverted
/// block subspace iteration with Rayleigh–Ritz extraction. Returns nullopt if
/// the iteration does not converge.
inline std::optional<Eigenpairs> lowest_eigenpairs(const Eigen::SparseMatrix<double>& a, std::size_t count,
                                                   std::size_t dense_limit = 600) {
  const auto n = a.rows();
  const auto want = static_cast<Eigen::Index>(std::min<std::size_t>(count, static_cast<std::size_t>(n)));
  if (want == 0) return Eigenpairs{};

  if (n <= static_cast<Eigen::Index>(dense_limit)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(a)};
    if (eig.info() != Eigen::Success) return std::nullopt;
    return Eigenpairs{eig.eigenvalues().head(want), eig.eigenvectors().leftCols(want)};
  }

  const auto block = std::min<Eigen::Index>(n, 2 * want + 8);
  double diag_scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(a.coeff(i, i)));
  const double shift = 1e-8 * std::max(diag_scale, 1.0);

  Eigen::SparseMatrix<double> shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) return std::nullopt;

  // Deterministic, non-degenerate start block.
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      x(i, j) = std::sin(0.7 * static_cast<double>((i + 1) * (j + 1)) + 0.3 * static_cast<double>(j));
    }
  }

  Eigenpairs out;
  for (int iter = 0; iter < 1000; ++iter) {
    Eigen::MatrixXd y = solver.solve(x);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    x = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    const Eigen::MatrixXd ax = a * x;
    const Eigen::MatrixXd h = x.transpose() * ax;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (h + h.transpose()));
    x = x * ritz.eigenvectors();
    const Eigen::MatrixXd residual = a * x - x * ritz.eigenvalues().asDiagonal();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < want; ++j) {
      worst = std::max(worst, residual.col(j).norm());
    }
    if (worst < 1e-11 * std::max(1.0, diag_scale)) {
      out.values = ritz.eigenvalues().head(want);
      out.vectors = x.leftCols(want);
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace salbench
