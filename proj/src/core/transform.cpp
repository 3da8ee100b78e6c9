// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/core/transform.hpp"

#include <cmath>

#include "occ/core/parallel.hpp"

namespace occ {

void apply_transform_in_place(const RigidTransform& t, PointCloud& cloud) {
  std::atomic<bool> bad{false};
  parallel_for(cloud.positions.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      cloud.positions[i] = t(cloud.positions[i]);
      if (!cloud.positions[i].allFinite()) bad.store(true, std::memory_order_relaxed);
    }
  });
  if (bad.load()) throw Error("apply_transform: non-finite result (corrupt input)");
}

PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud) {
  PointCloud out = cloud;
  apply_transform_in_place(t, out);
  return out;
}

RigidTransform transform_from_row_major(const std::array<double, 16>& m) {
  RigidTransform t;
  t.rotation << m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10];
  t.translation << m[3], m[7], m[11];
  return t;
}

std::array<double, 16> transform_to_row_major(const RigidTransform& t) {
  std::array<double, 16> m{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m[4 * r + c] = t.rotation(r, c);
    m[4 * r + 3] = t.translation[r];
  }
  m[15] = 1.0;
  return m;
}

RigidTransform yaw_rotation(double yaw) {
  RigidTransform t;
  const double c = std::cos(yaw), s = std::sin(yaw);
  t.rotation << c, -s, 0, s, c, 0, 0, 0, 1;
  return t;
}

}  // namespace occ
