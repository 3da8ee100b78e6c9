// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/densify/normals.hpp"

#include <Eigen/Eigenvalues>

#include "occ/core/kdtree.hpp"
#include "occ/core/parallel.hpp"

namespace occ::densify {

void OrientedPointCloud::validate() const {
  cloud.validate();
  if (normals.size() != cloud.size())
    throw Error("oriented cloud: normals length mismatch");
  for (const auto& n : normals)
    if (std::abs(n.norm() - 1.0) > 1e-6)
      throw Error("oriented cloud: non-unit normal");
}

OrientedPointCloud estimate_normals(const PointCloud& cloud, int k,
                                    const std::vector<Vec3>& sensor_origins) {
  cloud.validate();
  if (cloud.size() < 3)
    throw Error("estimate_normals: need at least 3 points, got " +
                std::to_string(cloud.size()));
  if (!cloud.has_frame_indices())
    throw Error("estimate_normals: cloud lacks frame_index (sensor lookup)");

  const int n = static_cast<int>(cloud.size());
  const int kk = std::max(3, std::min(k, n - 1));

  for (const std::uint32_t f : cloud.frame_indices)
    if (f >= sensor_origins.size())
      throw Error("estimate_normals: frame_index " + std::to_string(f) +
                  " has no sensor origin");

  const KdTree3 tree(cloud.positions);
  OrientedPointCloud out;
  out.cloud = cloud;
  out.normals.resize(cloud.size());

  parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> nn;
    for (std::size_t i = begin; i < end; ++i) {
      tree.knn(cloud.positions[i], kk, nn, /*exclude=*/i);

      Vec3 mean = Vec3::Zero();
      for (const std::size_t j : nn) mean += cloud.positions[j];
      mean /= static_cast<double>(nn.size());
      Mat3 cov = Mat3::Zero();
      for (const std::size_t j : nn) {
        const Vec3 d = cloud.positions[j] - mean;
        cov += d * d.transpose();
      }

      Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
      Vec3 normal = eig.eigenvectors().col(0);  // smallest eigenvalue
      const double norm = normal.norm();
      normal = norm > 0 ? Vec3(normal / norm) : Vec3(0, 0, 1);

      const Vec3 to_sensor =
          sensor_origins[cloud.frame_indices[i]] - cloud.positions[i];
      if (normal.dot(to_sensor) < 0) normal = -normal;
      out.normals[i] = normal;
    }
  });
  return out;
}

}  // namespace occ::densify
