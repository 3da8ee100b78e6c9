// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "occ/core/kdtree.hpp"
#include "occ/core/types.hpp"

namespace occ::label {

/// Immutable spatial index over the occupied voxels of a semantic grid,
/// queryable from any number of threads. Entries are ordered by linear voxel
/// index, so nearest-neighbor ties resolve to the smaller linear index.
class VoxelIndex {
 public:
  /// Throws Error when the grid has no occupied voxel.
  explicit VoxelIndex(const LabelGrid& v_s);

  std::size_t size() const { return labels_.size(); }
  const GridSpec& spec() const { return spec_; }

  /// Label and linear index of the occupied voxel nearest to `p` (squared
  /// Euclidean distance between voxel centers; ties -> smaller linear index).
  std::uint16_t nearest_label(const Vec3& p) const;

 private:
  GridSpec spec_;
  KdTree3 tree_;
  std::vector<std::uint16_t> labels_;
};

VoxelIndex build_voxel_index(const LabelGrid& v_s);

/// Semantic transfer: every occupied voxel of the binary grid `v_d` takes
/// the label of the nearest occupied voxel in the index; free voxels stay 0.
/// The grids must share a GridSpec. The search is unbounded.
LabelGrid assign_labels(const LabelGrid& v_d, const VoxelIndex& index);

}  // namespace occ::label
