// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "occ/core/types.hpp"
#include "occ/densify/poisson.hpp"
#include "occ/voxel/voxelize.hpp"

namespace occ::pipeline {

/// Everything a pipeline run needs beyond the scene itself. Serializes
/// losslessly to JSON; numeric fields are validated on load.
struct PipelineConfig {
  GridSpec grid;                 // output grid, in the target frame's ego coords
  double box_margin = 0.1;       // m
  int normal_k = 16;
  int refinement = 2;            // Poisson solve grid = output grid * refinement
  densify::SolverParams solver;
  voxel::MeshVoxelization mesh_mode = voxel::MeshVoxelization::kConservative;
  bool nn_labeling = true;
  int threads = 0;               // 0 = hardware default; OCC_THREADS overrides
  std::uint64_t seed = 0;        // consumed by randomized test tooling only
  double self_radius = 0.0;      // m; 0 disables the ego-return filter
  bool dump_field = false;       // also write the solved field as chi.occf

  void validate() const;
  std::string to_json() const;

  /// 16-hex-digit digest of the canonical serialization.
  std::string hash() const;
};

/// Named grid presets:
///   "nuscenes"       200x200x16 at 0.5 m over [-50,50]^2 x [-5,3]
///   "semantickitti"  256x256x32 at 0.2 m over [0,51.2] x [-25.6,25.6] x [-2,4.4]
GridSpec preset_grid(const std::string& name);

PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace occ::pipeline
