// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "occ/core/types.hpp"

namespace occ::project {

/// Dense 2D feature planes at `stride` times coarser resolution than the
/// camera image; values are row-major with channels innermost.
struct FeatureMap {
  int width = 0, height = 0, channels = 0;
  float stride = 1.0f;  // image px per feature cell
  std::vector<float> values;

  float at(int u, int v, int c) const {
    return values[(static_cast<std::size_t>(v) * width + u) * channels + c];
  }
  void validate() const;
};

/// Per-voxel feature volume over a grid.
struct VolumeFeatures {
  GridSpec spec;
  int channels = 0;
  std::vector<float> values;  // count() * channels, voxel-major

  void validate() const;
};

struct Projection {
  double u = 0, v = 0, depth = 0;
};

/// Projects a world point into one camera: world -> ego -> camera ->
/// pixel. Present iff the camera-frame depth is positive and (u, v) lands in
/// [0, width) x [0, height).
std::optional<Projection> project_to_view(const Vec3& p_world, const CameraModel& cam,
                                          const RigidTransform& ego_pose);

/// Indices of the cameras hit by the point (ascending).
std::vector<int> hit_views(const Vec3& p_world, const std::vector<CameraModel>& cameras,
                           const RigidTransform& ego_pose);

/// Bilinear sample at image coordinates (u, v); feature coordinates are
/// (u, v)/stride clamped to the map borders.
void bilinear_sample(const FeatureMap& fm, double u, double v, float* out);
std::vector<float> bilinear_sample(const FeatureMap& fm, double u, double v);

/// Per-voxel mean of bilinear samples over the views the voxel center hits
/// (cameras summed in index order); zero where no view hits. This is the
/// plain averaging fusion used as the non-learned baseline.
VolumeFeatures average_lift(const GridSpec& spec, const std::vector<FeatureMap>& maps,
                            const std::vector<CameraModel>& cameras,
                            const RigidTransform& ego_pose);

/// .occm container (tests and the CLI demo).
void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm);
FeatureMap read_feature_map(const std::filesystem::path& path);

}  // namespace occ::project
