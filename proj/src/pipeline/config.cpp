// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/pipeline/config.hpp"

#include <fstream>

#include <json.hpp>

#include "occ/io/binary_formats.hpp"

namespace occ::pipeline {

using nlohmann::json;

void PipelineConfig::validate() const {
  try {
    grid.validate();
    solver.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (box_margin < 0) throw ConfigError("config: box_margin must be >= 0");
  if (normal_k < 3) throw ConfigError("config: normal_k must be >= 3");
  if (refinement < 1) throw ConfigError("config: refinement must be >= 1");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  if (self_radius < 0) throw ConfigError("config: self_radius must be >= 0");
}

GridSpec preset_grid(const std::string& name) {
  GridSpec g;
  if (name == "nuscenes") {
    g.origin = Vec3(-50.0, -50.0, -5.0);
    g.voxel_size = 0.5;
    g.dims = Eigen::Vector3i(200, 200, 16);
  } else if (name == "semantickitti") {
    g.origin = Vec3(0.0, -25.6, -2.0);
    g.voxel_size = 0.2;
    g.dims = Eigen::Vector3i(256, 256, 32);
  } else {
    throw ConfigError("unknown grid preset: " + name);
  }
  return g;
}

std::string PipelineConfig::to_json() const {
  json j;
  j["grid"] = {{"origin", {grid.origin.x(), grid.origin.y(), grid.origin.z()}},
               {"voxel_size", grid.voxel_size},
               {"dims", {grid.dims.x(), grid.dims.y(), grid.dims.z()}}};
  j["box_margin"] = box_margin;
  j["normal_k"] = normal_k;
  j["poisson"] = {{"refinement", refinement},
                  {"tolerance", solver.tolerance},
                  {"max_iterations", solver.max_iterations}};
  j["mesh_voxelization"] =
      mesh_mode == voxel::MeshVoxelization::kConservative ? "conservative" : "sampled";
  j["nn_labeling"] = nn_labeling;
  j["threads"] = threads;
  j["seed"] = seed;
  j["self_radius"] = self_radius;
  j["dump_field"] = dump_field;
  return j.dump(2);
}

std::string PipelineConfig::hash() const {
  const std::string canonical = to_json();
  return io::bytes_hash(canonical.data(), canonical.size());
}

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  PipelineConfig cfg;
  try {
    if (j.contains("preset")) cfg.grid = preset_grid(j["preset"].get<std::string>());
    if (j.contains("grid")) {
      const auto& jg = j["grid"];
      const auto& o = jg.at("origin");
      cfg.grid.origin = Vec3(o.at(0).get<double>(), o.at(1).get<double>(),
                             o.at(2).get<double>());
      cfg.grid.voxel_size = jg.at("voxel_size").get<double>();
      const auto& d = jg.at("dims");
      cfg.grid.dims =
          Eigen::Vector3i(d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>());
    }
    if (!j.contains("preset") && !j.contains("grid"))
      throw ConfigError("config: either \"preset\" or \"grid\" is required");
    cfg.box_margin = j.value("box_margin", cfg.box_margin);
    cfg.normal_k = j.value("normal_k", cfg.normal_k);
    if (j.contains("poisson")) {
      const auto& jp = j["poisson"];
      cfg.refinement = jp.value("refinement", cfg.refinement);
      cfg.solver.tolerance = jp.value("tolerance", cfg.solver.tolerance);
      cfg.solver.max_iterations = jp.value("max_iterations", cfg.solver.max_iterations);
    }
    if (j.contains("mesh_voxelization")) {
      const std::string mode = j["mesh_voxelization"].get<std::string>();
      if (mode == "conservative")
        cfg.mesh_mode = voxel::MeshVoxelization::kConservative;
      else if (mode == "sampled")
        cfg.mesh_mode = voxel::MeshVoxelization::kSampled;
      else
        throw ConfigError("config: unknown mesh_voxelization mode: " + mode);
    }
    cfg.nn_labeling = j.value("nn_labeling", cfg.nn_labeling);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.self_radius = j.value("self_radius", cfg.self_radius);
    cfg.dump_field = j.value("dump_field", cfg.dump_field);
  } catch (const json::exception& e) {
    throw ConfigError("config schema error: " + std::string(e.what()));
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

}  // namespace occ::pipeline
