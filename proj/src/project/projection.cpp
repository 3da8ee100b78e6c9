// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/project/projection.hpp"

#include <cstring>
#include <fstream>

#include "occ/core/parallel.hpp"

namespace occ::project {

void FeatureMap::validate() const {
  if (width < 1 || height < 1 || channels < 1)
    throw Error("feature map: width/height/channels must be >= 1");
  if (!(stride > 0)) throw Error("feature map: stride must be > 0");
  if (values.size() != static_cast<std::size_t>(width) * height * channels)
    throw Error("feature map: values length mismatch");
}

void VolumeFeatures::validate() const {
  spec.validate();
  if (channels < 1) throw Error("volume features: channels must be >= 1");
  if (values.size() != spec.count() * channels)
    throw Error("volume features: values length mismatch");
}

std::optional<Projection> project_to_view(const Vec3& p_world, const CameraModel& cam,
                                          const RigidTransform& ego_pose) {
  const Vec3 p_ego = invert(ego_pose)(p_world);
  const Vec3 p_cam = cam.extrinsic(p_ego);
  if (!(p_cam.z() > 0)) return std::nullopt;
  const double u = cam.fx * p_cam.x() / p_cam.z() + cam.cx;
  const double v = cam.fy * p_cam.y() / p_cam.z() + cam.cy;
  if (u < 0 || v < 0 || u >= cam.width || v >= cam.height) return std::nullopt;
  return Projection{u, v, p_cam.z()};
}

std::vector<int> hit_views(const Vec3& p_world, const std::vector<CameraModel>& cameras,
                           const RigidTransform& ego_pose) {
  std::vector<int> hits;
  for (std::size_t i = 0; i < cameras.size(); ++i)
    if (project_to_view(p_world, cameras[i], ego_pose)) hits.push_back(static_cast<int>(i));
  return hits;
}

void bilinear_sample(const FeatureMap& fm, double u, double v, float* out) {
  double fu = u / fm.stride;
  double fv = v / fm.stride;
  fu = std::clamp(fu, 0.0, static_cast<double>(fm.width - 1));
  fv = std::clamp(fv, 0.0, static_cast<double>(fm.height - 1));
  int u0 = std::min(static_cast<int>(fu), fm.width - 2);
  int v0 = std::min(static_cast<int>(fv), fm.height - 2);
  u0 = std::max(u0, 0);
  v0 = std::max(v0, 0);
  const int u1 = std::min(u0 + 1, fm.width - 1);
  const int v1 = std::min(v0 + 1, fm.height - 1);
  const double au = fu - u0, av = fv - v0;
  for (int c = 0; c < fm.channels; ++c) {
    const double top = fm.at(u0, v0, c) * (1 - au) + fm.at(u1, v0, c) * au;
    const double bot = fm.at(u0, v1, c) * (1 - au) + fm.at(u1, v1, c) * au;
    out[c] = static_cast<float>(top * (1 - av) + bot * av);
  }
}

std::vector<float> bilinear_sample(const FeatureMap& fm, double u, double v) {
  std::vector<float> out(fm.channels);
  bilinear_sample(fm, u, v, out.data());
  return out;
}

VolumeFeatures average_lift(const GridSpec& spec, const std::vector<FeatureMap>& maps,
                            const std::vector<CameraModel>& cameras,
                            const RigidTransform& ego_pose) {
  spec.validate();
  if (maps.size() != cameras.size())
    throw Error("average_lift: one feature map per camera required");
  if (maps.empty()) throw Error("average_lift: need at least one camera");
  const int channels = maps[0].channels;
  for (const auto& m : maps) {
    m.validate();
    if (m.channels != channels) throw Error("average_lift: channel count mismatch");
  }

  VolumeFeatures vol;
  vol.spec = spec;
  vol.channels = channels;
  vol.values.assign(spec.count() * channels, 0.0f);

  parallel_for(spec.count(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> acc(channels);
    std::vector<float> sample(channels);
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Vec3 center = spec.center(spec.unlinear(idx));
      std::fill(acc.begin(), acc.end(), 0.0);
      int hits = 0;
      for (std::size_t cam = 0; cam < cameras.size(); ++cam) {
        const auto proj = project_to_view(center, cameras[cam], ego_pose);
        if (!proj) continue;
        bilinear_sample(maps[cam], proj->u, proj->v, sample.data());
        for (int c = 0; c < channels; ++c) acc[c] += sample[c];
        ++hits;
      }
      if (hits == 0) continue;
      float* out = &vol.values[idx * channels];
      for (int c = 0; c < channels; ++c)
        out[c] = static_cast<float>(acc[c] / hits);
    }
  });
  return vol;
}

void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm) {
  fm.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write feature map: " + path.string());
  out.write("OCCM", 4);
  const std::uint32_t version = 1;
  const std::uint32_t w = fm.width, h = fm.height, c = fm.channels;
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&c), 4);
  out.write(reinterpret_cast<const char*>(&fm.stride), 4);
  out.write(reinterpret_cast<const char*>(fm.values.data()),
            static_cast<std::streamsize>(fm.values.size() * sizeof(float)));
  if (!out) throw Error("feature map write failed: " + path.string());
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature map: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "OCCM", 4) != 0)
    throw Error("bad magic in " + path.string());
  std::uint32_t version = 0, w = 0, h = 0, c = 0;
  float stride = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&c), 4);
  in.read(reinterpret_cast<char*>(&stride), 4);
  if (!in) throw Error("truncated feature map: " + path.string());
  if (version != 1) throw Error("unsupported feature map version");
  FeatureMap fm;
  fm.width = static_cast<int>(w);
  fm.height = static_cast<int>(h);
  fm.channels = static_cast<int>(c);
  fm.stride = stride;
  fm.values.resize(static_cast<std::size_t>(w) * h * c);
  in.read(reinterpret_cast<char*>(fm.values.data()),
          static_cast<std::streamsize>(fm.values.size() * sizeof(float)));
  if (!in) throw Error("truncated feature map: " + path.string());
  fm.validate();
  return fm;
}

}  // namespace occ::project
