// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "occ/core/types.hpp"

namespace occ::voxel {

/// One camera depth image; depths <= 0 are invalid.
struct DepthMap {
  int width = 0, height = 0;
  std::vector<float> depths;  // row-major, meters
  CameraModel camera;         // extrinsic: ego-from... see CameraModel
  RigidTransform ego_pose;    // world-from-ego at capture time

  void validate() const;
  float depth_at(int u, int v) const { return depths[static_cast<std::size_t>(v) * width + u]; }
};

/// Projective TSDF fusion of same-timestamp depth maps into a binary grid.
/// Per voxel, each view where the center projects to a valid pixel with a
/// valid depth contributes clamp(depth - z_cam, +-truncation) at weight 1;
/// a voxel is occupied iff it has any weight and |mean sdf| < voxel_size.
/// Truncation <= 0 selects the default 2 * voxel_size.
LabelGrid tsdf_fuse(const std::vector<DepthMap>& depth_maps, const GridSpec& spec,
                    double truncation = 0.0);

/// Loads `<stem>.f32` raw little-endian depth files with `<stem>.json`
/// sidecars ({width, height, camera, ego_pose}) from a directory, sorted by
/// filename.
std::vector<DepthMap> load_depth_maps(const std::filesystem::path& dir);

void save_depth_map(const DepthMap& map, const std::filesystem::path& f32_path);

}  // namespace occ::voxel
