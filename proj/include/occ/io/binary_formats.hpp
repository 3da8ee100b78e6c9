// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk containers. All formats are little-endian with 4-byte ASCII magic:
//
//   .occp  "OCCP" u32 version=1, u8 flags (bit0 labels, bit1 intensity,
//          bit2 frame_index), u64 count, then per point: 3*f32 position
//          [+ u16 label][+ f32 intensity][+ u32 frame_index]
//   .occv  "OCCV" u32 version=1, 3*f64 origin, f64 voxel_size, 3*u32 dims,
//          then H*W*Z u16 labels, row-major (i, then j, then k)
//   .occf  same layout as .occv with f32 values (debug scalar fields)
//   .occm  "OCCM" u32 version=1, u32 width, u32 height, u32 channels,
//          f32 stride, then w*h*c f32 values (row-major, channel innermost)

#pragma once

#include <filesystem>
#include <string>

#include "occ/core/types.hpp"

namespace occ::io {

/// Thrown on bad magic, truncated payloads, version mismatches.
struct FormatError : Error {
  using Error::Error;
};

void write_points(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_points(const std::filesystem::path& path);

void write_grid(const std::filesystem::path& path, const LabelGrid& grid);
LabelGrid read_grid(const std::filesystem::path& path);

void write_field(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field(const std::filesystem::path& path);

/// FNV-1a over the file's bytes, as a 16-digit hex string (provenance).
std::string file_hash(const std::filesystem::path& path);
std::string bytes_hash(const void* data, std::size_t n);

}  // namespace occ::io
