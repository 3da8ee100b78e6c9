// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "occ/core/types.hpp"

namespace occ::voxel {

enum class MeshVoxelization {
  kConservative,  // triangle/cube intersection (separating axis)
  kSampled,       // mark vertex-containing voxels only
};

/// Binary occupancy (label 1) of every voxel whose closed cube intersects a
/// triangle. The conservative mode misses no intersecting triangle; the
/// sampled mode exists for comparison runs.
LabelGrid voxelize_mesh(const TriangleMesh& mesh, const GridSpec& spec,
                        MeshVoxelization mode = MeshVoxelization::kConservative);

/// Exact triangle/cube overlap test (separating axis), both closed sets.
bool triangle_intersects_box(const Vec3& v0, const Vec3& v1, const Vec3& v2,
                             const Vec3& box_center, const Vec3& half_extents);

struct VoxelizePointsResult {
  LabelGrid grid;
  std::size_t unlabeled_rejected = 0;  // label-0 points, excluded
  std::size_t outside = 0;             // points outside the grid volume
};

/// Semantic voxelization: each voxel takes the majority label of its points
/// (ties go to the smallest class id). Points labeled 0 are rejected and
/// counted. Requires a labels channel.
VoxelizePointsResult voxelize_points(const PointCloud& cloud, const GridSpec& spec);

/// One point per occupied voxel, at the voxel center, carrying the label.
PointCloud occupancy_to_points(const LabelGrid& grid);

}  // namespace occ::voxel
