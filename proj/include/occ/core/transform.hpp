// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "occ/core/types.hpp"

namespace occ {

/// Maps every position by p -> R*p + t; labels, intensities and frame
/// indices are carried through unchanged. Throws Error if a mapped position
/// is non-finite (corrupt input).
PointCloud apply_transform(const RigidTransform& t, const PointCloud& cloud);

/// In-place variant.
void apply_transform_in_place(const RigidTransform& t, PointCloud& cloud);

/// 4x4 row-major <-> RigidTransform conversion helpers (manifest format).
RigidTransform transform_from_row_major(const std::array<double, 16>& m);
std::array<double, 16> transform_to_row_major(const RigidTransform& t);

/// Rotation about +z.
RigidTransform yaw_rotation(double yaw);

}  // namespace occ
