// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0
//
// Stage-wise batch pipeline with on-disk contracts, so long sequences can be
// resumed per stage and `occ pipeline` is byte-identical to chaining the
// stage commands. Layout under the output directory:
//
//   agg/                      stitch output (static.occp, object_*.occp, index.json)
//   frame_<N>/merged.occp     composed labeled cloud for the target frame
//   frame_<N>/mesh.ply        reconstructed surface (binary, float64)
//   frame_<N>/v_d.occv        dense binary occupancy from the mesh
//   frame_<N>/v_s.occv        sparse semantic voxels from the merged cloud
//   frame_<N>/occupancy.occv  final labeled grid
//   provenance.json           written by run_pipeline

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "occ/io/scene.hpp"
#include "occ/pipeline/config.hpp"

namespace occ::pipeline {

struct StitchInfo {
  std::size_t static_points = 0;
  std::size_t object_points = 0;
  std::size_t objects = 0;
  double ms = 0;
};

struct DensifyInfo {
  std::size_t merged_points = 0;
  std::size_t dropped_points = 0;
  std::size_t mesh_vertices = 0;
  std::size_t mesh_triangles = 0;
  double iso_value = 0;
  bool solver_converged = false;
  int solver_iterations = 0;
  double solver_residual = 0;
  double ms = 0;
};

struct VoxelizeInfo {
  std::size_t vd_occupied = 0;
  std::size_t vs_occupied = 0;
  std::size_t unlabeled_rejected = 0;
  double ms = 0;
};

struct LabelInfo {
  std::size_t final_occupied = 0;
  double ms = 0;
};

/// Aggregates the whole scene into out_dir/agg.
StitchInfo stitch_stage(const io::SceneManifest& manifest, const PipelineConfig& cfg,
                        const std::filesystem::path& out_dir);

/// Composes the merged cloud for one target frame from out_dir/agg, runs
/// normal estimation and Poisson reconstruction, and writes merged.occp and
/// mesh.ply (and chi.occf when configured) into out_dir/frame_<N>/.
DensifyInfo densify_stage(const io::SceneManifest& manifest, std::size_t frame,
                          const PipelineConfig& cfg,
                          const std::filesystem::path& out_dir);

/// Reads mesh.ply and merged.occp for the frame and writes v_d.occv/v_s.occv.
VoxelizeInfo voxelize_stage(std::size_t frame, const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir);

/// Reads v_d.occv (and v_s.occv when NN labeling is on) and writes
/// occupancy.occv.
LabelInfo label_stage(std::size_t frame, const PipelineConfig& cfg,
                      const std::filesystem::path& out_dir);

/// Full run: stitch once, then densify/voxelize/label per requested frame
/// (empty = all), then provenance.json. Returns the final grid paths.
std::vector<std::filesystem::path> run_pipeline(
    const std::filesystem::path& manifest_path, const PipelineConfig& cfg,
    const std::filesystem::path& out_dir,
    const std::optional<std::vector<std::size_t>>& frames = std::nullopt);

}  // namespace occ::pipeline
