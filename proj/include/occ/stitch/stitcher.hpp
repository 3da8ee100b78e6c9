// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "occ/core/types.hpp"
#include "occ/io/scene.hpp"

namespace occ::stitch {

/// Per-frame split of a sweep into the static remainder and per-instance
/// object segments. All clouds are in the frame's ego coordinates.
struct FrameSegments {
  PointCloud static_points;
  std::map<std::string, PointCloud> object_points;  // instance_id -> points
};

/// Multi-frame aggregate: static scene in the world frame, every object in
/// its box-local (canonical) frame, plus per-frame sensor origins.
struct AggregatedScene {
  struct ObjectTrack {
    PointCloud canonical_points;  // box-local frame
    std::uint16_t class_id = 0;
  };

  PointCloud static_world;
  std::map<std::string, ObjectTrack> objects;  // keyed by instance_id
  std::vector<Vec3> frame_sensor_origins;      // world frame, by frame ordinal

  std::size_t total_points() const;
};

struct StitchOptions {
  double box_margin = 0.1;   // m, inflation applied when cutting object points
  double self_radius = 0.0;  // m, drop returns within this of the sensor (0 = off)
};

/// Splits a sensor-frame sweep by the frame's boxes. A point inside several
/// boxes goes to the one with the nearest center (ties by lexicographic
/// instance_id); everything else is static. The partition is exhaustive and
/// disjoint, except for points culled by `self_radius`.
FrameSegments segment_frame(const PointCloud& sensor_points, const io::FrameRecord& frame,
                            const StitchOptions& opts = {});

/// Runs segment_frame over every frame, mapping static segments into the
/// world frame and object segments into their instance's box-local frame.
/// Point order is (frame ordinal, point ordinal) regardless of thread count,
/// and each point's frame_index is set to its source frame ordinal.
/// Throws Error if an instance changes class_id across frames.
AggregatedScene aggregate_scene(const io::SceneManifest& manifest,
                                const std::vector<PointCloud>& frame_points,
                                const StitchOptions& opts = {});

/// Re-composes the merged cloud for one target frame, in that frame's ego
/// coordinates: static points via world->ego, objects via their target-frame
/// box pose. Instances without a box in the target frame are omitted.
PointCloud compose_frame(const AggregatedScene& agg, const io::FrameRecord& target);

/// Persists an aggregate as one .occp per stream plus index.json in `dir`.
void save_aggregate(const AggregatedScene& agg, const std::filesystem::path& dir);
AggregatedScene load_aggregate(const std::filesystem::path& dir);

}  // namespace occ::stitch
