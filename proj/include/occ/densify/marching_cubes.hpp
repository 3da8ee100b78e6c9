// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "occ/core/types.hpp"

namespace occ::densify {

/// Table-driven marching cubes over the cell-centered sample lattice (one
/// cube per 2x2x2 block of neighboring cells). Edge vertices are placed by
/// linear interpolation and welded across cubes, and triangles are oriented
/// with normals pointing toward increasing field values.
///
/// The 256-case table is generated with a fixed per-face rule (below-iso
/// corners on an ambiguous face are kept separated), which makes facing
/// cubes agree on their shared segments: meshes from fields with no
/// iso-crossing on the grid boundary are closed.
TriangleMesh marching_cubes(const ScalarField& field, double iso);

}  // namespace occ::densify
