// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/pipeline/pipeline.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "occ/core/parallel.hpp"
#include "occ/core/transform.hpp"
#include "occ/densify/normals.hpp"
#include "occ/densify/poisson.hpp"
#include "occ/io/binary_formats.hpp"
#include "occ/io/ply.hpp"
#include "occ/label/nn_label.hpp"
#include "occ/stitch/stitcher.hpp"
#include "occ/voxel/voxelize.hpp"

namespace occ::pipeline {

using nlohmann::json;

namespace {

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::filesystem::path frame_dir(const std::filesystem::path& out_dir, std::size_t frame) {
  return out_dir / ("frame_" + std::to_string(frame));
}

}  // namespace

StitchInfo stitch_stage(const io::SceneManifest& manifest, const PipelineConfig& cfg,
                        const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<PointCloud> frame_points(manifest.frames.size());
  parallel_for(manifest.frames.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f)
      frame_points[f] = manifest.load_frame_points(f);
  });

  stitch::StitchOptions opts;
  opts.box_margin = cfg.box_margin;
  opts.self_radius = cfg.self_radius;
  const stitch::AggregatedScene agg = aggregate_scene(manifest, frame_points, opts);
  stitch::save_aggregate(agg, out_dir / "agg");

  StitchInfo info;
  info.static_points = agg.static_world.size();
  info.object_points = agg.total_points() - agg.static_world.size();
  info.objects = agg.objects.size();
  info.ms = ms_since(t0);
  return info;
}

DensifyInfo densify_stage(const io::SceneManifest& manifest, std::size_t frame,
                          const PipelineConfig& cfg,
                          const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  if (frame >= manifest.frames.size())
    throw SceneError("densify: frame ordinal " + std::to_string(frame) +
                     " out of range");
  const io::FrameRecord& target = manifest.frames[frame];

  const stitch::AggregatedScene agg = stitch::load_aggregate(out_dir / "agg");
  const PointCloud merged = stitch::compose_frame(agg, target);

  const auto dir = frame_dir(out_dir, frame);
  std::filesystem::create_directories(dir);
  io::write_points(dir / "merged.occp", merged);

  // Keep a small apron beyond the grid so border points get full
  // neighborhoods; reconstruction drops anything outside the grid itself.
  const double apron = 4.0 * cfg.grid.voxel_size;
  const Vec3 lo = cfg.grid.origin - apron * Vec3::Ones();
  const Vec3 hi = cfg.grid.max_corner() + apron * Vec3::Ones();
  PointCloud cropped;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Vec3& p = merged.positions[i];
    if ((p.array() >= lo.array()).all() && (p.array() <= hi.array()).all())
      cropped.push_back(merged, i);
  }

  const RigidTransform ego_from_world = invert(target.ego_pose);
  std::vector<Vec3> origins_ego;
  origins_ego.reserve(agg.frame_sensor_origins.size());
  for (const auto& o : agg.frame_sensor_origins) origins_ego.push_back(ego_from_world(o));

  const densify::OrientedPointCloud oriented =
      densify::estimate_normals(cropped, cfg.normal_k, origins_ego);

  const GridSpec solve_grid = cfg.grid.refined(cfg.refinement);
  densify::ReconstructReport rep;
  ScalarField chi;
  const TriangleMesh mesh = densify::poisson_reconstruct(
      oriented, solve_grid, cfg.solver, &rep, cfg.dump_field ? &chi : nullptr);
  if (cfg.dump_field) io::write_field(dir / "chi.occf", chi);
  io::export_ply(mesh, dir / "mesh.ply", /*binary=*/true);

  DensifyInfo info;
  info.merged_points = merged.size();
  info.dropped_points = (merged.size() - cropped.size()) + rep.dropped_points;
  info.mesh_vertices = mesh.vertices.size();
  info.mesh_triangles = mesh.triangles.size();
  info.iso_value = rep.iso_value;
  info.solver_converged = rep.solve.converged;
  info.solver_iterations = rep.solve.iterations;
  info.solver_residual = rep.solve.relative_residual;
  info.ms = ms_since(t0);
  return info;
}

VoxelizeInfo voxelize_stage(std::size_t frame, const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = frame_dir(out_dir, frame);
  const TriangleMesh mesh = io::read_ply_mesh(dir / "mesh.ply");
  const LabelGrid v_d = voxel::voxelize_mesh(mesh, cfg.grid, cfg.mesh_mode);
  io::write_grid(dir / "v_d.occv", v_d);

  const PointCloud merged = io::read_points(dir / "merged.occp");
  VoxelizeInfo info;
  if (merged.has_labels()) {
    const voxel::VoxelizePointsResult vs = voxel::voxelize_points(merged, cfg.grid);
    io::write_grid(dir / "v_s.occv", vs.grid);
    info.vs_occupied = vs.grid.occupied_count();
    info.unlabeled_rejected = vs.unlabeled_rejected;
  } else if (cfg.nn_labeling) {
    throw Error("voxelize: NN labeling is enabled but the cloud has no labels");
  }
  info.vd_occupied = v_d.occupied_count();
  info.ms = ms_since(t0);
  return info;
}

LabelInfo label_stage(std::size_t frame, const PipelineConfig& cfg,
                      const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = frame_dir(out_dir, frame);
  const LabelGrid v_d = io::read_grid(dir / "v_d.occv");
  LabelGrid out;
  if (cfg.nn_labeling) {
    const LabelGrid v_s = io::read_grid(dir / "v_s.occv");
    const label::VoxelIndex index(v_s);
    out = label::assign_labels(v_d, index);
  } else {
    out = v_d;
  }
  io::write_grid(dir / "occupancy.occv", out);

  LabelInfo info;
  info.final_occupied = out.occupied_count();
  info.ms = ms_since(t0);
  return info;
}

std::vector<std::filesystem::path> run_pipeline(
    const std::filesystem::path& manifest_path, const PipelineConfig& cfg,
    const std::filesystem::path& out_dir,
    const std::optional<std::vector<std::size_t>>& frames) {
  cfg.validate();
  set_thread_count(cfg.threads);
  const io::SceneManifest manifest = io::load_scene(manifest_path);

  std::vector<std::size_t> targets;
  if (frames) {
    targets = *frames;
    for (const std::size_t f : targets)
      if (f >= manifest.frames.size())
        throw SceneError("pipeline: frame ordinal " + std::to_string(f) +
                         " out of range (scene has " +
                         std::to_string(manifest.frames.size()) + " frames)");
  } else {
    for (std::size_t f = 0; f < manifest.frames.size(); ++f) targets.push_back(f);
  }

  std::filesystem::create_directories(out_dir);

  json prov;
  prov["scene"] = manifest_path.string();
  prov["scene_id"] = manifest.scene_id;
  prov["config"] = json::parse(cfg.to_json());
  prov["config_hash"] = cfg.hash();
  prov["thread_count"] = thread_count();
  prov["input_hashes"] = json::object();
  prov["input_hashes"]["manifest"] = io::file_hash(manifest_path);
  prov["input_hashes"]["points"] = json::array();
  for (const auto& f : manifest.frames)
    prov["input_hashes"]["points"].push_back(io::file_hash(f.points_path));

  const StitchInfo stitch_info = stitch_stage(manifest, cfg, out_dir);
  prov["stitch"] = {{"static_points", stitch_info.static_points},
                    {"object_points", stitch_info.object_points},
                    {"objects", stitch_info.objects},
                    {"ms", stitch_info.ms}};

  std::vector<std::filesystem::path> outputs;
  prov["frames"] = json::array();
  for (const std::size_t f : targets) {
    const DensifyInfo d = densify_stage(manifest, f, cfg, out_dir);
    const VoxelizeInfo v = voxelize_stage(f, cfg, out_dir);
    const LabelInfo l = label_stage(f, cfg, out_dir);
    json jf;
    jf["ordinal"] = f;
    jf["counts"] = {{"merged_points", d.merged_points},
                    {"dropped_points", d.dropped_points},
                    {"mesh_vertices", d.mesh_vertices},
                    {"mesh_triangles", d.mesh_triangles},
                    {"vd_occupied", v.vd_occupied},
                    {"vs_occupied", v.vs_occupied},
                    {"unlabeled_rejected", v.unlabeled_rejected},
                    {"final_occupied", l.final_occupied}};
    jf["solver"] = {{"converged", d.solver_converged},
                    {"iterations", d.solver_iterations},
                    {"relative_residual", d.solver_residual},
                    {"iso_value", d.iso_value}};
    jf["timings_ms"] = {
        {"densify", d.ms}, {"voxelize", v.ms}, {"label", l.ms}};
    jf["output"] = (frame_dir(out_dir, f) / "occupancy.occv").string();
    prov["frames"].push_back(jf);
    outputs.push_back(frame_dir(out_dir, f) / "occupancy.occv");
  }

  std::ofstream out(out_dir / "provenance.json", std::ios::trunc);
  if (!out) throw Error("cannot write provenance.json in " + out_dir.string());
  out << prov.dump(2) << "\n";
  return outputs;
}

}  // namespace occ::pipeline
