// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/label/nn_label.hpp"

#include "occ/core/parallel.hpp"

namespace occ::label {

VoxelIndex::VoxelIndex(const LabelGrid& v_s) : spec_(v_s.spec) {
  v_s.validate();
  std::vector<Vec3> centers;
  for (std::size_t idx = 0; idx < v_s.labels.size(); ++idx) {
    if (v_s.labels[idx] == 0) continue;
    centers.push_back(spec_.center(spec_.unlinear(idx)));
    labels_.push_back(v_s.labels[idx]);
  }
  if (centers.empty()) throw Error("build_voxel_index: no occupied voxels in V_s");
  tree_ = KdTree3(std::move(centers));
}

std::uint16_t VoxelIndex::nearest_label(const Vec3& p) const {
  return labels_[tree_.nearest(p).index];
}

VoxelIndex build_voxel_index(const LabelGrid& v_s) { return VoxelIndex(v_s); }

LabelGrid assign_labels(const LabelGrid& v_d, const VoxelIndex& index) {
  v_d.validate();
  if (!(v_d.spec == index.spec()))
    throw GridMismatchError("assign_labels: V_d and V_s grids differ");

  LabelGrid out(v_d.spec);
  parallel_for(v_d.labels.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      if (v_d.labels[idx] == 0) continue;
      out.labels[idx] =
          index.nearest_label(v_d.spec.center(v_d.spec.unlinear(idx)));
    }
  });
  return out;
}

}  // namespace occ::label
