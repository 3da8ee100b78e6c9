// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "occ/core/types.hpp"

namespace occ::io {

/// One LiDAR sweep plus its annotations.
struct FrameRecord {
  std::uint64_t timestamp_us = 0;
  RigidTransform ego_pose;         // world-from-ego
  RigidTransform lidar_extrinsic;  // ego-from-sensor
  std::vector<CameraModel> cameras;
  std::vector<OrientedBox> boxes;  // in this frame's ego coordinates
  std::filesystem::path points_path;  // resolved to an absolute path on load

  /// World position of the LiDAR sensor at this frame.
  Vec3 sensor_origin_world() const {
    return compose(ego_pose, lidar_extrinsic).translation;
  }
};

struct SceneManifest {
  std::string scene_id;
  std::vector<std::string> class_names;  // indexed by class id; [0] is free space
  std::vector<FrameRecord> frames;

  /// Sensor-frame points of frame `ordinal`, read from its .occp file.
  PointCloud load_frame_points(std::size_t ordinal) const;
};

/// Parses and validates a scene manifest. Frame point files are checked for
/// existence but not read (frames load lazily via load_frame_points).
/// Violations raise SceneError naming the offending frame.
SceneManifest load_scene(const std::filesystem::path& manifest_path);

/// Writes `manifest` as JSON. Point paths are stored relative to the
/// manifest's directory.
void save_scene(const SceneManifest& manifest, const std::filesystem::path& manifest_path);

}  // namespace occ::io
