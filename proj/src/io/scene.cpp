// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/io/scene.hpp"

#include <fstream>
#include <map>

#include <json.hpp>

#include "occ/core/transform.hpp"
#include "occ/io/binary_formats.hpp"

namespace occ::io {

using nlohmann::json;

namespace {

std::array<double, 16> matrix16(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 16)
    throw SceneError(what + ": expected 16 row-major doubles");
  std::array<double, 16> m{};
  for (int i = 0; i < 16; ++i) m[i] = j[i].get<double>();
  return m;
}

json matrix16_json(const RigidTransform& t) {
  const auto m = transform_to_row_major(t);
  return json(m);
}

Vec3 vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw SceneError(what + ": expected 3 doubles");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void check_pose(const RigidTransform& t, const std::string& what) {
  if (t.orthonormality_error() > 1e-6)
    throw SceneError(what + ": rotation is not orthonormal");
  if (t.rotation.determinant() <= 0)
    throw SceneError(what + ": rotation determinant is not +1");
}

}  // namespace

PointCloud SceneManifest::load_frame_points(std::size_t ordinal) const {
  if (ordinal >= frames.size())
    throw SceneError("frame ordinal out of range: " + std::to_string(ordinal));
  return read_points(frames[ordinal].points_path);
}

SceneManifest load_scene(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw SceneError("cannot open manifest: " + manifest_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SceneError("manifest parse error in " + manifest_path.string() + ": " +
                     e.what());
  }

  SceneManifest m;
  try {
    m.scene_id = j.at("scene_id").get<std::string>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    const auto& frames = j.at("frames");
    const auto base = manifest_path.parent_path();
    std::uint64_t prev_ts = 0;
    std::map<std::string, std::uint16_t> instance_class;
    for (std::size_t fi = 0; fi < frames.size(); ++fi) {
      const auto& jf = frames[fi];
      const std::string where = "frame " + std::to_string(fi);
      FrameRecord f;
      f.timestamp_us = jf.at("timestamp_us").get<std::uint64_t>();
      if (fi > 0 && f.timestamp_us <= prev_ts)
        throw SceneError(where + ": timestamps must be strictly increasing");
      prev_ts = f.timestamp_us;
      f.ego_pose = transform_from_row_major(matrix16(jf.at("ego_pose"), where + " ego_pose"));
      check_pose(f.ego_pose, where + " ego_pose");
      f.lidar_extrinsic = transform_from_row_major(
          matrix16(jf.at("lidar_extrinsic"), where + " lidar_extrinsic"));
      check_pose(f.lidar_extrinsic, where + " lidar_extrinsic");
      for (const auto& jc : jf.at("cameras")) {
        CameraModel cam;
        cam.fx = jc.at("fx").get<double>();
        cam.fy = jc.at("fy").get<double>();
        cam.cx = jc.at("cx").get<double>();
        cam.cy = jc.at("cy").get<double>();
        cam.width = jc.at("width").get<int>();
        cam.height = jc.at("height").get<int>();
        cam.extrinsic =
            transform_from_row_major(matrix16(jc.at("extrinsic"), where + " camera"));
        check_pose(cam.extrinsic, where + " camera extrinsic");
        try {
          cam.validate();
        } catch (const Error& e) {
          throw SceneError(where + ": " + e.what());
        }
        f.cameras.push_back(cam);
      }
      for (const auto& jb : jf.at("boxes")) {
        OrientedBox box;
        box.center = vec3(jb.at("center"), where + " box center");
        box.size = vec3(jb.at("size_lwh"), where + " box size");
        box.yaw = jb.at("yaw").get<double>();
        box.instance_id = jb.at("instance_id").get<std::string>();
        const int cls = jb.at("class_id").get<int>();
        if (cls < 0 || cls >= static_cast<int>(m.class_names.size()))
          throw SceneError(where + ": box class_id " + std::to_string(cls) +
                           " out of range for " + std::to_string(m.class_names.size()) +
                           " classes");
        box.class_id = static_cast<std::uint16_t>(cls);
        try {
          box.validate();
        } catch (const Error& e) {
          throw SceneError(where + ": " + e.what());
        }
        auto [it, inserted] = instance_class.emplace(box.instance_id, box.class_id);
        if (!inserted && it->second != box.class_id)
          throw SceneError(where + ": instance '" + box.instance_id +
                           "' changes class across frames");
        f.boxes.push_back(std::move(box));
      }
      f.points_path = base / jf.at("points").get<std::string>();
      if (!std::filesystem::exists(f.points_path))
        throw SceneError(where + ": points file missing: " + f.points_path.string());
      m.frames.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw SceneError("manifest schema error in " + manifest_path.string() + ": " +
                     e.what());
  }
  return m;
}

void save_scene(const SceneManifest& manifest, const std::filesystem::path& manifest_path) {
  const auto base = manifest_path.parent_path();
  json j;
  j["scene_id"] = manifest.scene_id;
  j["class_names"] = manifest.class_names;
  j["frames"] = json::array();
  for (const auto& f : manifest.frames) {
    json jf;
    jf["timestamp_us"] = f.timestamp_us;
    jf["ego_pose"] = matrix16_json(f.ego_pose);
    jf["lidar_extrinsic"] = matrix16_json(f.lidar_extrinsic);
    jf["cameras"] = json::array();
    for (const auto& cam : f.cameras) {
      json jc;
      jc["fx"] = cam.fx;
      jc["fy"] = cam.fy;
      jc["cx"] = cam.cx;
      jc["cy"] = cam.cy;
      jc["width"] = cam.width;
      jc["height"] = cam.height;
      jc["extrinsic"] = matrix16_json(cam.extrinsic);
      jf["cameras"].push_back(jc);
    }
    jf["boxes"] = json::array();
    for (const auto& b : f.boxes) {
      json jb;
      jb["center"] = {b.center.x(), b.center.y(), b.center.z()};
      jb["size_lwh"] = {b.size.x(), b.size.y(), b.size.z()};
      jb["yaw"] = b.yaw;
      jb["instance_id"] = b.instance_id;
      jb["class_id"] = b.class_id;
      jf["boxes"].push_back(jb);
    }
    const auto rel = f.points_path.is_absolute()
                         ? std::filesystem::relative(f.points_path, base)
                         : f.points_path;
    jf["points"] = rel.generic_string();
    j["frames"].push_back(jf);
  }
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest: " + manifest_path.string());
  out << j.dump(2) << "\n";
}

}  // namespace occ::io
