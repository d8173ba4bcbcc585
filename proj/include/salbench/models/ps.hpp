#pragma once

#include <salbench/descriptor.hpp>
#include <salbench/models/prepare.hpp>
#include <salbench/saliency_map.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <span>
#include <vector>

namespace salbench {

/// Stacks descriptors row-wise into an n × 33 matrix.
inline Eigen::MatrixXd descriptor_matrix(std::span<const Descriptor33> descriptors) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(descriptors.size()), static_cast<Eigen::Index>(kDescriptorSize));
  for (std::size_t i = 0; i < descriptors.size(); ++i) {
    for (std::size_t j = 0; j < kDescriptorSize; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = descriptors[i][j];
    }
  }
  return m;
}

/// |row_i · a| after column-mean centring, a the first principal axis.
/// A (numerically) zero-variance matrix yields all zeros.
inline std::vector<double> pca_projection(const Eigen::MatrixXd& rows) {
  const auto n = rows.rows();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (n < 2) return out;
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  const double scale = rows.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return out;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const double top = svd.singularValues()(0);
  if (!(top > 1e-10 * scale * std::sqrt(static_cast<double>(centered.size())))) return out;
  const Eigen::VectorXd axis = svd.matrixV().col(0);
  const Eigen::VectorXd proj = centered * axis;
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::abs(proj(i));
  return out;
}

/// PCA-based saliency: FPFH at radius r_ps projected onto the strongest principal axis.
inline SaliencyMap compute_ps(const PointCloud& cloud, const ModelParams& params, std::string shape_id = {},
                              Warnings* warnings = nullptr) {
  params.validate();
  if (cloud.size() < 2) throw Error("PCA saliency needs at least 2 points");
  const PointCloud unit = prepare_cloud(cloud, params, warnings);
  const NeighborIndex index(unit.points);
  const auto descriptors = compute_fpfh_all(unit, index, params.r_ps, warnings);
  return make_map(std::move(shape_id), ModelTag::PS, pca_projection(descriptor_matrix(descriptors)));
}

}  // namespace salbench
