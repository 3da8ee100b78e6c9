// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "occ/core/types.hpp"

namespace occ::io {

/// Maps a semantic class id to a fixed RGB color (deterministic palette,
/// class 0 renders grey).
std::array<std::uint8_t, 3> label_color(std::uint16_t label);

/// Writes a mesh as PLY. Binary files store positions as float64 so a
/// write/read round trip is exact; ascii uses 9 significant digits.
void export_ply(const TriangleMesh& mesh, const std::filesystem::path& path,
                bool binary = true);

/// Writes a point cloud as PLY; labels (when present) become per-vertex
/// uchar colors via label_color().
void export_ply(const PointCloud& cloud, const std::filesystem::path& path,
                bool binary = true);

/// Reads PLY meshes/clouds written by export_ply (binary little-endian or
/// ascii; float32/float64 positions; int vertex_indices lists).
struct PlyContents {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int32_t, 3>> triangles;
};
PlyContents read_ply(const std::filesystem::path& path);

TriangleMesh read_ply_mesh(const std::filesystem::path& path);

}  // namespace occ::io
