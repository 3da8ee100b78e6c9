// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/synth/synth.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "occ/core/parallel.hpp"
#include "occ/core/transform.hpp"
#include "occ/io/binary_formats.hpp"

namespace occ::synth {

namespace {

constexpr double kRayMin = 1e-9;

struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  std::uint16_t class_id = 0;
  bool valid() const { return std::isfinite(t); }
};

void consider(RayHit& best, double t, std::uint16_t cls) {
  if (t <= kRayMin) return;
  if (t < best.t || (t == best.t && cls < best.class_id)) best = {t, cls};
}

double intersect_sphere(const Vec3& o, const Vec3& d, const Vec3& c, double r) {
  const Vec3 oc = o - c;
  const double b = d.dot(oc);
  const double disc = b * b - (oc.squaredNorm() - r * r);
  if (disc < 0) return -1;
  const double s = std::sqrt(disc);
  const double t0 = -b - s, t1 = -b + s;
  if (t0 > kRayMin) return t0;
  if (t1 > kRayMin) return t1;
  return -1;
}

// Slab test against [lo, hi]; returns the first positive surface crossing.
double intersect_aabb(const Vec3& o, const Vec3& d, const Vec3& lo, const Vec3& hi) {
  double tnear = -std::numeric_limits<double>::infinity();
  double tfar = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < lo[a] || o[a] > hi[a]) return -1;
      continue;
    }
    double t0 = (lo[a] - o[a]) / d[a];
    double t1 = (hi[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    tnear = std::max(tnear, t0);
    tfar = std::min(tfar, t1);
    if (tnear > tfar) return -1;
  }
  if (tnear > kRayMin) return tnear;
  if (tfar > kRayMin) return tfar;  // origin inside: exit crossing
  return -1;
}

double intersect_plane_z(const Vec3& o, const Vec3& d, double z) {
  if (std::abs(d.z()) < 1e-15) return -1;
  const double t = (z - o.z()) / d.z();
  return t > kRayMin ? t : -1;
}

RayHit cast_ray(const SyntheticSceneSpec& spec, const Vec3& o, const Vec3& d,
                double time) {
  RayHit best;
  for (const auto& s : spec.spheres) {
    const double t = intersect_sphere(o, d, s.center, s.radius);
    if (t > 0) consider(best, t, s.class_id);
  }
  for (const auto& b : spec.boxes) {
    const double t = intersect_aabb(o, d, b.min, b.max);
    if (t > 0) consider(best, t, b.class_id);
  }
  for (const auto& p : spec.planes) {
    const double t = intersect_plane_z(o, d, p.z);
    if (t > 0) consider(best, t, p.class_id);
  }
  for (const auto& mb : spec.moving_boxes) {
    const OrientedBox box = mb.at_time(time);
    const RigidTransform world_from_box = box.pose();
    const RigidTransform box_from_world = invert(world_from_box);
    const Vec3 ob = box_from_world(o);
    const Vec3 db = box_from_world.rotation * d;
    const Vec3 h = 0.5 * box.size;
    const double t = intersect_aabb(ob, db, -h, h);
    if (t > 0) consider(best, t, mb.class_id);
  }
  return best;
}

// Distance from p to the primitive SURFACE (not the solid).
double surface_distance_sphere(const Vec3& p, const Vec3& c, double r) {
  return std::abs((p - c).norm() - r);
}

double surface_distance_aabb(const Vec3& p, const Vec3& lo, const Vec3& hi) {
  Vec3 excess;
  bool inside = true;
  for (int a = 0; a < 3; ++a) {
    const double below = lo[a] - p[a];
    const double above = p[a] - hi[a];
    excess[a] = std::max({below, above, 0.0});
    inside = inside && below <= 0 && above <= 0;
  }
  if (!inside) return excess.norm();
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) d = std::min({d, p[a] - lo[a], hi[a] - p[a]});
  return d;
}

}  // namespace

OrientedBox MovingBox::at_time(double t_seconds) const {
  OrientedBox box;
  box.center = start_center + velocity * t_seconds;
  box.size = size_lwh;
  box.yaw = yaw + yaw_rate * t_seconds;
  box.instance_id = instance_id;
  box.class_id = class_id;
  return box;
}

void SyntheticSceneSpec::validate() const {
  for (const auto& s : spheres)
    if (!(s.radius > 0)) throw Error("synthetic spec: sphere radius must be > 0");
  for (const auto& b : boxes)
    if (!((b.max - b.min).minCoeff() > 0))
      throw Error("synthetic spec: box max must exceed min");
  for (const auto& mb : moving_boxes)
    if (!(mb.size_lwh.minCoeff() > 0))
      throw Error("synthetic spec: moving box size must be positive");
  if (beams.azimuth_steps < 1) throw Error("synthetic spec: azimuth_steps must be >= 1");
  if (beams.elevation_steps < 1)
    throw Error("synthetic spec: elevation_steps must be >= 1");
  if (!(max_range > 0)) throw Error("synthetic spec: max_range must be > 0");
  if (!(frame_dt > 0)) throw Error("synthetic spec: frame_dt must be > 0");
}

std::uint16_t SyntheticSceneSpec::max_class_id() const {
  std::uint16_t m = 0;
  for (const auto& s : spheres) m = std::max(m, s.class_id);
  for (const auto& b : boxes) m = std::max(m, b.class_id);
  for (const auto& p : planes) m = std::max(m, p.class_id);
  for (const auto& mb : moving_boxes) m = std::max(m, mb.class_id);
  return m;
}

SynthScene synth_scene(const SyntheticSceneSpec& spec) {
  spec.validate();
  SynthScene out;
  out.manifest.scene_id = spec.scene_id;
  if (spec.class_names.empty()) {
    for (int k = 0; k <= spec.max_class_id(); ++k)
      out.manifest.class_names.push_back(k == 0 ? "free" : "class_" + std::to_string(k));
  } else {
    out.manifest.class_names = spec.class_names;
  }

  const int n_frames = static_cast<int>(spec.sensor_trajectory.size());
  out.frame_points.resize(n_frames);
  for (int f = 0; f < n_frames; ++f) {
    const double time = f * spec.frame_dt;
    const RigidTransform& pose = spec.sensor_trajectory[f];
    const RigidTransform sensor_from_world = invert(pose);
    const Vec3 origin = pose.translation;

    PointCloud cloud;
    for (int ai = 0; ai < spec.beams.azimuth_steps; ++ai) {
      const double az = 2.0 * M_PI * ai / spec.beams.azimuth_steps;
      for (int ei = 0; ei < spec.beams.elevation_steps; ++ei) {
        const double el =
            spec.beams.elevation_steps == 1
                ? spec.beams.elevation_min
                : spec.beams.elevation_min +
                      (spec.beams.elevation_max - spec.beams.elevation_min) * ei /
                          (spec.beams.elevation_steps - 1);
        const Vec3 dir_sensor(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                              std::sin(el));
        const Vec3 dir_world = pose.rotation * dir_sensor;
        const RayHit hit = cast_ray(spec, origin, dir_world, time);
        if (!hit.valid() || hit.t > spec.max_range) continue;
        const Vec3 p_world = origin + hit.t * dir_world;
        cloud.positions.push_back(sensor_from_world(p_world));
        cloud.labels.push_back(hit.class_id);
        cloud.frame_indices.push_back(static_cast<std::uint32_t>(f));
      }
    }

    io::FrameRecord rec;
    rec.timestamp_us = static_cast<std::uint64_t>(f * spec.frame_dt * 1e6) + f + 1;
    rec.ego_pose = pose;
    rec.lidar_extrinsic = RigidTransform::identity();
    for (const auto& mb : spec.moving_boxes) {
      OrientedBox world_box = mb.at_time(time);
      // Manifest boxes live in ego coordinates.
      const RigidTransform ego_from_world = invert(pose);
      const RigidTransform box_in_ego = compose(ego_from_world, world_box.pose());
      OrientedBox ego_box = world_box;
      ego_box.center = box_in_ego.translation;
      ego_box.yaw = std::atan2(box_in_ego.rotation(1, 0), box_in_ego.rotation(0, 0));
      rec.boxes.push_back(ego_box);
    }
    rec.points_path = "frame_" + std::to_string(f) + ".occp";
    out.manifest.frames.push_back(std::move(rec));
    out.frame_points[f] = std::move(cloud);
  }
  return out;
}

std::filesystem::path write_synth_scene(const SyntheticSceneSpec& spec,
                                        const std::filesystem::path& dir) {
  SynthScene scene = synth_scene(spec);
  std::filesystem::create_directories(dir);
  for (std::size_t f = 0; f < scene.frame_points.size(); ++f) {
    const auto path = dir / scene.manifest.frames[f].points_path;
    io::write_points(path, scene.frame_points[f]);
    scene.manifest.frames[f].points_path = path;
  }
  const auto manifest_path = dir / "manifest.json";
  io::save_scene(scene.manifest, manifest_path);
  return manifest_path;
}

LabelGrid analytic_occupancy(const SyntheticSceneSpec& spec, const GridSpec& grid,
                             double shell, std::size_t frame_ordinal,
                             const RigidTransform& grid_pose) {
  if (!(shell > 0)) throw Error("analytic_occupancy: shell must be > 0");
  grid.validate();
  const double time = frame_ordinal * spec.frame_dt;

  struct MovingBoxLocal {
    RigidTransform box_from_world;
    Vec3 half;
    std::uint16_t class_id;
  };
  std::vector<MovingBoxLocal> moving;
  for (const auto& mb : spec.moving_boxes) {
    const OrientedBox box = mb.at_time(time);
    moving.push_back({invert(box.pose()), 0.5 * box.size, mb.class_id});
  }

  LabelGrid out(grid);
  parallel_for(grid.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 p = grid_pose(grid.center(grid.unlinear(idx)));
      std::uint32_t best = 0xffffffff;
      for (const auto& s : spec.spheres)
        if (surface_distance_sphere(p, s.center, s.radius) <= shell)
          best = std::min<std::uint32_t>(best, s.class_id);
      for (const auto& b : spec.boxes)
        if (surface_distance_aabb(p, b.min, b.max) <= shell)
          best = std::min<std::uint32_t>(best, b.class_id);
      for (const auto& pl : spec.planes)
        if (std::abs(p.z() - pl.z) <= shell)
          best = std::min<std::uint32_t>(best, pl.class_id);
      for (const auto& mb : moving)
        if (surface_distance_aabb(mb.box_from_world(p), -mb.half, mb.half) <= shell)
          best = std::min<std::uint32_t>(best, mb.class_id);
      if (best != 0xffffffff) out.labels[idx] = static_cast<std::uint16_t>(best);
    }
  });
  return out;
}

SyntheticSceneSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synthetic spec: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synthetic spec parse error: " + std::string(e.what()));
  }
  SyntheticSceneSpec spec;
  try {
    const auto vec3 = [](const nlohmann::json& a) {
      return Vec3(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
    };
    spec.scene_id = j.value("scene_id", std::string("synthetic"));
    if (j.contains("class_names"))
      spec.class_names = j["class_names"].get<std::vector<std::string>>();
    spec.max_range = j.value("max_range", 50.0);
    spec.frame_dt = j.value("frame_dt", 0.1);
    if (j.contains("beams")) {
      const auto& b = j["beams"];
      spec.beams.azimuth_steps = b.value("azimuth_steps", 64);
      spec.beams.elevation_steps = b.value("elevation_steps", 8);
      spec.beams.elevation_min = b.value("elevation_min_deg", -23.0) * M_PI / 180.0;
      spec.beams.elevation_max = b.value("elevation_max_deg", 6.0) * M_PI / 180.0;
    }
    for (const auto& p : j.value("primitives", nlohmann::json::array())) {
      const std::string type = p.at("type").get<std::string>();
      const auto cls = static_cast<std::uint16_t>(p.at("class_id").get<int>());
      if (type == "sphere") {
        spec.spheres.push_back({vec3(p.at("center")), p.at("radius").get<double>(), cls});
      } else if (type == "box") {
        spec.boxes.push_back({vec3(p.at("min")), vec3(p.at("max")), cls});
      } else if (type == "plane") {
        spec.planes.push_back({p.at("z").get<double>(), cls});
      } else {
        throw ConfigError("unknown primitive type: " + type);
      }
    }
    for (const auto& p : j.value("moving_boxes", nlohmann::json::array())) {
      MovingBox mb;
      mb.size_lwh = vec3(p.at("size_lwh"));
      mb.class_id = static_cast<std::uint16_t>(p.at("class_id").get<int>());
      mb.instance_id = p.at("instance_id").get<std::string>();
      mb.start_center = vec3(p.at("start_center"));
      mb.velocity = vec3(p.at("velocity"));
      mb.yaw = p.value("yaw", 0.0);
      mb.yaw_rate = p.value("yaw_rate", 0.0);
      spec.moving_boxes.push_back(std::move(mb));
    }
    for (const auto& t : j.at("trajectory")) {
      std::array<double, 16> m{};
      for (int i = 0; i < 16; ++i) m[i] = t.at(i).get<double>();
      spec.sensor_trajectory.push_back(transform_from_row_major(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synthetic spec schema error: " + std::string(e.what()));
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

}  // namespace occ::synth
