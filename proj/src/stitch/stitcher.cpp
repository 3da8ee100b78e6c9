// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/stitch/stitcher.hpp"

#include <fstream>

#include <json.hpp>

#include "occ/core/parallel.hpp"
#include "occ/core/transform.hpp"
#include "occ/io/binary_formats.hpp"

namespace occ::stitch {

using nlohmann::json;

std::size_t AggregatedScene::total_points() const {
  std::size_t n = static_world.size();
  for (const auto& [id, track] : objects) n += track.canonical_points.size();
  return n;
}

FrameSegments segment_frame(const PointCloud& sensor_points, const io::FrameRecord& frame,
                            const StitchOptions& opts) {
  sensor_points.validate();
  FrameSegments out;
  const PointCloud ego_points = apply_transform(frame.lidar_extrinsic, sensor_points);

  // Assignment per point: -1 static, else index into frame.boxes.
  const std::size_t n = ego_points.size();
  std::vector<std::int32_t> owner(n, -1);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (opts.self_radius > 0 &&
          sensor_points.positions[i].norm() <= opts.self_radius) {
        owner[i] = -2;  // culled ego return
        continue;
      }
      const Vec3& p = ego_points.positions[i];
      std::int32_t best = -1;
      double best_dist = 0;
      for (std::size_t b = 0; b < frame.boxes.size(); ++b) {
        const auto& box = frame.boxes[b];
        if (!point_in_box(p, box, opts.box_margin)) continue;
        const double d = (p - box.center).squaredNorm();
        if (best < 0 || d < best_dist ||
            (d == best_dist &&
             box.instance_id < frame.boxes[best].instance_id)) {
          best = static_cast<std::int32_t>(b);
          best_dist = d;
        }
      }
      owner[i] = best;
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] == -2) continue;
    if (owner[i] < 0) {
      out.static_points.push_back(ego_points, i);
    } else {
      out.object_points[frame.boxes[owner[i]].instance_id].push_back(ego_points, i);
    }
  }
  return out;
}

AggregatedScene aggregate_scene(const io::SceneManifest& manifest,
                                const std::vector<PointCloud>& frame_points,
                                const StitchOptions& opts) {
  if (frame_points.size() != manifest.frames.size())
    throw Error("aggregate_scene: got " + std::to_string(frame_points.size()) +
                " point clouds for " + std::to_string(manifest.frames.size()) +
                " frames");

  // Optional channels must agree across frames or the concatenations below
  // would come out ragged.
  bool seen = false, want_labels = false, want_intensity = false;
  for (const auto& cloud : frame_points) {
    if (cloud.empty()) continue;
    if (!seen) {
      want_labels = cloud.has_labels();
      want_intensity = cloud.has_intensities();
      seen = true;
    } else if (cloud.has_labels() != want_labels ||
               cloud.has_intensities() != want_intensity) {
      throw Error("aggregate_scene: frames carry inconsistent optional channels");
    }
  }

  const std::size_t n_frames = manifest.frames.size();
  std::vector<FrameSegments> segments(n_frames);
  // Frames are independent; the merge below runs in frame order, so the
  // output layout does not depend on scheduling.
  parallel_for(n_frames, [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f)
      segments[f] = segment_frame(frame_points[f], manifest.frames[f], opts);
  });

  AggregatedScene agg;
  agg.frame_sensor_origins.resize(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const auto& frame = manifest.frames[f];
    agg.frame_sensor_origins[f] = frame.sensor_origin_world();

    PointCloud static_world = apply_transform(frame.ego_pose, segments[f].static_points);
    static_world.frame_indices.assign(static_world.size(),
                                      static_cast<std::uint32_t>(f));
    agg.static_world.append(static_world);

    std::map<std::string, const OrientedBox*> boxes_by_id;
    for (const auto& box : frame.boxes) boxes_by_id[box.instance_id] = &box;

    for (auto& [instance_id, points] : segments[f].object_points) {
      const OrientedBox& box = *boxes_by_id.at(instance_id);
      auto& track = agg.objects[instance_id];
      if (track.canonical_points.empty()) {
        track.class_id = box.class_id;
      } else if (track.class_id != box.class_id) {
        throw Error("instance '" + instance_id + "' changes class_id across frames (" +
                    std::to_string(track.class_id) + " -> " +
                    std::to_string(box.class_id) + ")");
      }
      PointCloud canonical = apply_transform(invert(box.pose()), points);
      canonical.frame_indices.assign(canonical.size(), static_cast<std::uint32_t>(f));
      track.canonical_points.append(canonical);
    }
  }
  return agg;
}

PointCloud compose_frame(const AggregatedScene& agg, const io::FrameRecord& target) {
  PointCloud out = apply_transform(invert(target.ego_pose), agg.static_world);
  for (const auto& box : target.boxes) {
    const auto it = agg.objects.find(box.instance_id);
    if (it == agg.objects.end()) continue;
    out.append(apply_transform(box.pose(), it->second.canonical_points));
  }
  return out;
}

void save_aggregate(const AggregatedScene& agg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_points(dir / "static.occp", agg.static_world);
  json j;
  j["static"] = "static.occp";
  j["sensor_origins"] = json::array();
  for (const auto& o : agg.frame_sensor_origins)
    j["sensor_origins"].push_back({o.x(), o.y(), o.z()});
  j["objects"] = json::array();
  std::size_t i = 0;
  for (const auto& [instance_id, track] : agg.objects) {
    const std::string name = "object_" + std::to_string(i++) + ".occp";
    io::write_points(dir / name, track.canonical_points);
    j["objects"].push_back(
        {{"instance_id", instance_id}, {"class_id", track.class_id}, {"points", name}});
  }
  std::ofstream out(dir / "index.json", std::ios::trunc);
  if (!out) throw Error("cannot write aggregate index in " + dir.string());
  out << j.dump(2) << "\n";
}

AggregatedScene load_aggregate(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.json");
  if (!in) throw Error("cannot open aggregate index in " + dir.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("aggregate index parse error: " + std::string(e.what()));
  }
  AggregatedScene agg;
  agg.static_world = io::read_points(dir / j.at("static").get<std::string>());
  for (const auto& o : j.at("sensor_origins"))
    agg.frame_sensor_origins.emplace_back(o.at(0).get<double>(), o.at(1).get<double>(),
                                          o.at(2).get<double>());
  for (const auto& jo : j.at("objects")) {
    AggregatedScene::ObjectTrack track;
    track.class_id = static_cast<std::uint16_t>(jo.at("class_id").get<int>());
    track.canonical_points = io::read_points(dir / jo.at("points").get<std::string>());
    agg.objects.emplace(jo.at("instance_id").get<std::string>(), std::move(track));
  }
  return agg;
}

}  // namespace occ::stitch
