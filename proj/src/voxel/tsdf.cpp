// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/voxel/tsdf.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "occ/core/parallel.hpp"
#include "occ/core/transform.hpp"

namespace occ::voxel {

using nlohmann::json;

void DepthMap::validate() const {
  camera.validate();
  if (width < 1 || height < 1) throw Error("depth map: invalid size");
  if (depths.size() != static_cast<std::size_t>(width) * height)
    throw Error("depth map: depths length != width*height");
}

LabelGrid tsdf_fuse(const std::vector<DepthMap>& depth_maps, const GridSpec& spec,
                    double truncation) {
  spec.validate();
  if (depth_maps.empty()) throw Error("tsdf_fuse: need at least one depth map");
  for (const auto& m : depth_maps) m.validate();
  const double trunc = truncation > 0 ? truncation : 2.0 * spec.voxel_size;

  struct View {
    RigidTransform cam_from_world;
    const DepthMap* map;
  };
  std::vector<View> views;
  views.reserve(depth_maps.size());
  for (const auto& m : depth_maps)
    views.push_back({compose(m.camera.extrinsic, invert(m.ego_pose)), &m});

  LabelGrid grid(spec);
  parallel_for(spec.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 p_world = spec.center(spec.unlinear(idx));
      double sdf_sum = 0.0;
      int weight = 0;
      for (const auto& view : views) {
        const Vec3 p_cam = view.cam_from_world(p_world);
        if (p_cam.z() <= 0) continue;
        const CameraModel& cam = view.map->camera;
        const double u = cam.fx * p_cam.x() / p_cam.z() + cam.cx;
        const double v = cam.fy * p_cam.y() / p_cam.z() + cam.cy;
        if (u < 0 || v < 0 || u >= cam.width || v >= cam.height) continue;
        const int ui = static_cast<int>(u), vi = static_cast<int>(v);
        const float d = view.map->depth_at(ui, vi);
        if (!(d > 0) || !std::isfinite(d)) continue;
        const double sdf = std::clamp(static_cast<double>(d) - p_cam.z(), -trunc, trunc);
        sdf_sum += sdf;
        ++weight;
      }
      if (weight > 0 && std::abs(sdf_sum / weight) < spec.voxel_size)
        grid.labels[idx] = 1;
    }
  });
  return grid;
}

std::vector<DepthMap> load_depth_maps(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".f32") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no .f32 depth files in " + dir.string());

  std::vector<DepthMap> maps;
  for (const auto& f32 : files) {
    auto sidecar = f32;
    sidecar.replace_extension(".json");
    std::ifstream js(sidecar);
    if (!js) throw Error("missing depth sidecar: " + sidecar.string());
    json j;
    try {
      js >> j;
    } catch (const json::exception& e) {
      throw Error("depth sidecar parse error (" + sidecar.string() + "): " + e.what());
    }
    DepthMap m;
    try {
      m.width = j.at("width").get<int>();
      m.height = j.at("height").get<int>();
      const auto& jc = j.at("camera");
      m.camera.fx = jc.at("fx").get<double>();
      m.camera.fy = jc.at("fy").get<double>();
      m.camera.cx = jc.at("cx").get<double>();
      m.camera.cy = jc.at("cy").get<double>();
      m.camera.width = jc.at("width").get<int>();
      m.camera.height = jc.at("height").get<int>();
      std::array<double, 16> raw{};
      for (int i = 0; i < 16; ++i) raw[i] = jc.at("extrinsic").at(i).get<double>();
      m.camera.extrinsic = transform_from_row_major(raw);
      for (int i = 0; i < 16; ++i) raw[i] = j.at("ego_pose").at(i).get<double>();
      m.ego_pose = transform_from_row_major(raw);
    } catch (const json::exception& e) {
      throw Error("depth sidecar schema error (" + sidecar.string() + "): " + e.what());
    }

    std::ifstream in(f32, std::ios::binary);
    if (!in) throw Error("cannot open depth file: " + f32.string());
    m.depths.resize(static_cast<std::size_t>(m.width) * m.height);
    in.read(reinterpret_cast<char*>(m.depths.data()),
            static_cast<std::streamsize>(m.depths.size() * sizeof(float)));
    if (!in) throw Error("truncated depth file: " + f32.string());
    m.validate();
    maps.push_back(std::move(m));
  }
  return maps;
}

void save_depth_map(const DepthMap& map, const std::filesystem::path& f32_path) {
  map.validate();
  std::ofstream out(f32_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write depth file: " + f32_path.string());
  out.write(reinterpret_cast<const char*>(map.depths.data()),
            static_cast<std::streamsize>(map.depths.size() * sizeof(float)));

  json j;
  j["width"] = map.width;
  j["height"] = map.height;
  json jc;
  jc["fx"] = map.camera.fx;
  jc["fy"] = map.camera.fy;
  jc["cx"] = map.camera.cx;
  jc["cy"] = map.camera.cy;
  jc["width"] = map.camera.width;
  jc["height"] = map.camera.height;
  jc["extrinsic"] = transform_to_row_major(map.camera.extrinsic);
  j["camera"] = jc;
  j["ego_pose"] = transform_to_row_major(map.ego_pose);
  auto sidecar = f32_path;
  sidecar.replace_extension(".json");
  std::ofstream js(sidecar, std::ios::trunc);
  if (!js) throw Error("cannot write depth sidecar: " + sidecar.string());
  js << j.dump(2) << "\n";
}

}  // namespace occ::voxel
