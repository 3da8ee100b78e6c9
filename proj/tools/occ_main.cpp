// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0
//
// occ: batch generation of dense semantic occupancy ground truth from
// multi-frame LiDAR scenes, plus the matching evaluation tools.
//
// Exit codes: 0 ok, 2 invalid config, 3 invalid scene, 4 stage failure,
// 5 grid spec mismatch (eval).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "occ/core/parallel.hpp"
#include "occ/io/binary_formats.hpp"
#include "occ/io/ply.hpp"
#include "occ/io/scene.hpp"
#include "occ/metrics/metrics.hpp"
#include "occ/pipeline/pipeline.hpp"
#include "occ/synth/synth.hpp"
#include "occ/voxel/tsdf.hpp"

namespace {

namespace fs = std::filesystem;
using namespace occ;

constexpr int kExitConfig = 2;
constexpr int kExitScene = 3;
constexpr int kExitStage = 4;
constexpr int kExitSpecMismatch = 5;

pipeline::PipelineConfig resolve_config(const std::string& config_path) {
  if (config_path.empty()) {
    pipeline::PipelineConfig cfg;
    cfg.grid = pipeline::preset_grid("nuscenes");
    return cfg;
  }
  return pipeline::load_config(config_path);
}

std::optional<std::vector<std::size_t>> parse_frames(const std::string& arg) {
  if (arg == "all") return std::nullopt;
  std::vector<std::size_t> frames;
  std::size_t pos = 0;
  while (pos < arg.size()) {
    const std::size_t comma = arg.find(',', pos);
    const std::string tok = arg.substr(pos, comma == std::string::npos ? arg.npos : comma - pos);
    try {
      frames.push_back(std::stoul(tok));
    } catch (const std::exception&) {
      throw ConfigError("--frame expects an ordinal, a comma list, or 'all'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (frames.empty()) throw ConfigError("--frame: empty selection");
  return frames;
}

int run_pipeline_cmd(const std::string& scene, const std::string& frame,
                     const std::string& config, const std::string& out) {
  const auto cfg = resolve_config(config);
  const auto frames = parse_frames(frame);
  const auto outputs = pipeline::run_pipeline(scene, cfg, out, frames);
  for (const auto& p : outputs) std::cout << p.string() << "\n";
  return 0;
}

int run_eval_cmd(const std::string& pred, const std::string& gt_path, double tau,
                 const std::string& out) {
  const LabelGrid gt = io::read_grid(gt_path);
  std::string report;
  if (fs::path(pred).extension() == ".occp") {
    const PointCloud cloud = io::read_points(pred);
    report = metrics::evaluate_run(nullptr, &cloud, gt, tau);
  } else {
    const LabelGrid grid = io::read_grid(pred);
    report = metrics::evaluate_run(&grid, nullptr, gt, tau);
  }
  if (out.empty()) {
    std::cout << report << "\n";
  } else {
    std::ofstream f(out, std::ios::trunc);
    if (!f) throw Error("cannot write report: " + out);
    f << report << "\n";
    std::cout << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dense occupancy ground-truth pipeline and evaluation"};
  app.require_subcommand(1);

  // pipeline
  std::string scene, frame = "all", config, out;
  auto* cmd_pipeline = app.add_subcommand(
      "pipeline", "stitch -> densify -> voxelize -> label, per target frame");
  cmd_pipeline->add_option("--scene", scene, "scene manifest JSON")->required();
  cmd_pipeline->add_option("--frame", frame, "target frame ordinal, comma list, or 'all'");
  cmd_pipeline->add_option("--config", config, "pipeline config JSON");
  cmd_pipeline->add_option("--out", out, "output directory")->required();

  // eval
  std::string pred, gt;
  double tau = 0.5;
  auto* cmd_eval = app.add_subcommand("eval", "score a prediction against dense ground truth");
  cmd_eval->add_option("--pred", pred, "predicted grid (.occv) or point cloud (.occp)")
      ->required();
  cmd_eval->add_option("--gt", gt, "ground-truth grid (.occv)")->required();
  cmd_eval->add_option("--tau", tau, "distance threshold in meters (default 0.5)");
  cmd_eval->add_option("--out", out, "report JSON path (default: stdout)");

  // synth
  std::string spec_path;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic scene bundle");
  cmd_synth->add_option("--spec", spec_path, "synthetic scene spec JSON")->required();
  cmd_synth->add_option("--out", out, "output directory")->required();
  bool oracle = false;
  double oracle_shell = 0.0;
  std::size_t oracle_frame = 0;
  cmd_synth->add_flag("--oracle", oracle,
                      "also write oracle.occv (analytic surface occupancy, ego frame "
                      "of --oracle-frame, nuScenes-preset grid unless --config)");
  cmd_synth->add_option("--oracle-shell", oracle_shell, "oracle shell width (default voxel size)");
  cmd_synth->add_option("--oracle-frame", oracle_frame, "frame for the oracle grid");
  cmd_synth->add_option("--config", config, "config JSON providing the oracle grid");

  // stitch
  auto* cmd_stitch = app.add_subcommand("stitch", "aggregate a scene into out/agg");
  cmd_stitch->add_option("--scene", scene, "scene manifest JSON")->required();
  cmd_stitch->add_option("--config", config, "pipeline config JSON");
  cmd_stitch->add_option("--out", out, "output directory")->required();

  // densify
  std::size_t frame_ordinal = 0;
  auto* cmd_densify =
      app.add_subcommand("densify", "compose one frame from out/agg and reconstruct");
  cmd_densify->add_option("--scene", scene, "scene manifest JSON")->required();
  cmd_densify->add_option("--frame", frame_ordinal, "target frame ordinal")->required();
  cmd_densify->add_option("--config", config, "pipeline config JSON");
  cmd_densify->add_option("--out", out, "output directory (with agg/)")->required();

  // voxelize
  auto* cmd_voxelize =
      app.add_subcommand("voxelize", "voxelize a frame's mesh and labeled cloud");
  cmd_voxelize->add_option("--frame", frame_ordinal, "target frame ordinal")->required();
  cmd_voxelize->add_option("--config", config, "pipeline config JSON");
  cmd_voxelize->add_option("--out", out, "output directory (with frame_<N>/)")->required();

  // label
  auto* cmd_label = app.add_subcommand("label", "NN semantic transfer onto v_d");
  cmd_label->add_option("--frame", frame_ordinal, "target frame ordinal")->required();
  cmd_label->add_option("--config", config, "pipeline config JSON");
  cmd_label->add_option("--out", out, "output directory (with frame_<N>/)")->required();

  // tsdf
  std::string depths_dir, grid_out;
  double truncation = 0.0;
  auto* cmd_tsdf = app.add_subcommand("tsdf", "fuse multi-camera depth maps into a grid");
  cmd_tsdf->add_option("--depths", depths_dir, "directory of .f32 + .json depth maps")
      ->required();
  cmd_tsdf->add_option("--config", config, "pipeline config JSON (grid)");
  cmd_tsdf->add_option("--truncation", truncation, "truncation distance (default 2*voxel)");
  cmd_tsdf->add_option("--out", grid_out, "output grid (.occv)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_pipeline->parsed()) return run_pipeline_cmd(scene, frame, config, out);
    if (cmd_eval->parsed()) return run_eval_cmd(pred, gt, tau, out);

    if (cmd_synth->parsed()) {
      const auto spec = synth::load_synth_spec(spec_path);
      const auto manifest_path = synth::write_synth_scene(spec, out);
      std::cout << manifest_path.string() << "\n";
      if (oracle) {
        const auto cfg = resolve_config(config);
        const io::SceneManifest manifest = io::load_scene(manifest_path);
        if (oracle_frame >= manifest.frames.size())
          throw SceneError("--oracle-frame out of range");
        const double shell = oracle_shell > 0 ? oracle_shell : cfg.grid.voxel_size;
        const LabelGrid grid =
            synth::analytic_occupancy(spec, cfg.grid, shell, oracle_frame,
                                      manifest.frames[oracle_frame].ego_pose);
        io::write_grid(fs::path(out) / "oracle.occv", grid);
      }
      return 0;
    }

    if (cmd_stitch->parsed()) {
      const auto cfg = resolve_config(config);
      set_thread_count(cfg.threads);
      const io::SceneManifest manifest = io::load_scene(scene);
      const auto info = pipeline::stitch_stage(manifest, cfg, out);
      std::cout << "static points: " << info.static_points
                << ", object points: " << info.object_points
                << ", objects: " << info.objects << "\n";
      return 0;
    }

    if (cmd_densify->parsed()) {
      const auto cfg = resolve_config(config);
      set_thread_count(cfg.threads);
      const io::SceneManifest manifest = io::load_scene(scene);
      const auto info = pipeline::densify_stage(manifest, frame_ordinal, cfg, out);
      std::cout << "mesh: " << info.mesh_vertices << " vertices, "
                << info.mesh_triangles << " triangles\n";
      return 0;
    }

    if (cmd_voxelize->parsed()) {
      const auto cfg = resolve_config(config);
      set_thread_count(cfg.threads);
      const auto info = pipeline::voxelize_stage(frame_ordinal, cfg, out);
      std::cout << "v_d occupied: " << info.vd_occupied
                << ", v_s occupied: " << info.vs_occupied << "\n";
      return 0;
    }

    if (cmd_label->parsed()) {
      const auto cfg = resolve_config(config);
      set_thread_count(cfg.threads);
      const auto info = pipeline::label_stage(frame_ordinal, cfg, out);
      std::cout << "final occupied: " << info.final_occupied << "\n";
      return 0;
    }

    if (cmd_tsdf->parsed()) {
      const auto cfg = resolve_config(config);
      set_thread_count(cfg.threads);
      const auto maps = voxel::load_depth_maps(depths_dir);
      const LabelGrid grid = voxel::tsdf_fuse(maps, cfg.grid, truncation);
      io::write_grid(grid_out, grid);
      std::cout << grid_out << " (" << grid.occupied_count() << " occupied)\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SceneError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitScene;
  } catch (const GridMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpecMismatch;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
