// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "occ/core/types.hpp"
#include "occ/io/scene.hpp"

namespace occ::synth {

struct SpherePrimitive {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  std::uint16_t class_id = 1;
};

/// Axis-aligned, static.
struct BoxPrimitive {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Ones();
  std::uint16_t class_id = 1;
};

/// Infinite horizontal plane z = const.
struct PlanePrimitive {
  double z = 0.0;
  std::uint16_t class_id = 1;
};

/// Rigid box on a constant-velocity track; produces a per-frame OrientedBox
/// annotation and ray-castable geometry.
struct MovingBox {
  Vec3 size_lwh = Vec3::Ones();
  std::uint16_t class_id = 1;
  std::string instance_id = "obj0";
  Vec3 start_center = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();  // m/s
  double yaw = 0.0;              // rad at t = 0
  double yaw_rate = 0.0;         // rad/s

  OrientedBox at_time(double t_seconds) const;
};

struct BeamPattern {
  int azimuth_steps = 64;               // over [0, 2*pi)
  int elevation_steps = 8;              // inclusive sweep of [min, max]
  double elevation_min = -0.4;          // rad
  double elevation_max = 0.1;           // rad
};

/// Desk-scale simulated scene; the sensor pose per frame doubles as the ego
/// pose (lidar extrinsic is identity).
struct SyntheticSceneSpec {
  std::string scene_id = "synthetic";
  std::vector<std::string> class_names;  // defaulted to "class_<k>" when empty
  std::vector<SpherePrimitive> spheres;
  std::vector<BoxPrimitive> boxes;
  std::vector<PlanePrimitive> planes;
  std::vector<MovingBox> moving_boxes;
  std::vector<RigidTransform> sensor_trajectory;  // world-from-sensor, one per frame
  BeamPattern beams;
  double max_range = 50.0;
  double frame_dt = 0.1;  // seconds between frames

  void validate() const;
  std::uint16_t max_class_id() const;
};

struct SynthScene {
  io::SceneManifest manifest;            // points_path left as relative names
  std::vector<PointCloud> frame_points;  // sensor-frame, labeled, frame-indexed
};

/// Ray-casts the beam grid from every trajectory pose. Each returned point is
/// the nearest ray/primitive intersection within max_range and carries the
/// primitive's class id and the frame ordinal.
SynthScene synth_scene(const SyntheticSceneSpec& spec);

/// Writes manifest.json plus one .occp per frame into `dir`.
std::filesystem::path write_synth_scene(const SyntheticSceneSpec& spec,
                                        const std::filesystem::path& dir);

/// Ground-truth surface occupancy: a voxel gets a primitive's class iff its
/// center lies within `shell` of that primitive's surface; overlaps resolve
/// to the smallest class id. Moving boxes are evaluated at `frame_ordinal`,
/// and voxel centers are mapped through `grid_pose` (world-from-grid) first,
/// so a grid expressed in a frame's ego coordinates can be evaluated
/// directly.
LabelGrid analytic_occupancy(const SyntheticSceneSpec& spec, const GridSpec& grid,
                             double shell, std::size_t frame_ordinal = 0,
                             const RigidTransform& grid_pose = RigidTransform{});

/// JSON spec file (CLI surface); see README for the schema.
SyntheticSceneSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace occ::synth
