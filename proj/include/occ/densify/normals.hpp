// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "occ/core/types.hpp"

namespace occ::densify {

/// Point cloud with a unit normal per point.
struct OrientedPointCloud {
  PointCloud cloud;
  std::vector<Vec3> normals;

  std::size_t size() const { return cloud.size(); }
  void validate() const;
};

/// PCA normals: each point's normal is the smallest-eigenvalue eigenvector
/// of its k-nearest-neighbor covariance (k clamped to size()-1, floor 3,
/// neighbors exclude the point itself), sign-flipped toward the sensor that
/// observed the point: normal . (sensor_origin - p) >= 0.
///
/// `sensor_origins` is indexed by the cloud's per-point frame_index and must
/// be expressed in the same coordinates as the cloud. Requires >= 3 points
/// and a frame_index channel.
OrientedPointCloud estimate_normals(const PointCloud& cloud, int k,
                                    const std::vector<Vec3>& sensor_origins);

}  // namespace occ::densify
