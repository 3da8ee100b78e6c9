// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "occ/core/types.hpp"
#include "occ/densify/normals.hpp"

namespace occ::densify {

struct SolverParams {
  double tolerance = 1e-6;   // relative residual target, in (0, 1)
  int max_iterations = 2000;

  void validate() const;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Unscaled 7-point Neumann (zero-flux) Laplacian on cell centers:
/// (L x)_c = sum over present neighbors (x_nb - x_c). Missing neighbors at
/// the grid boundary contribute nothing.
ScalarField apply_laplacian(const ScalarField& x);

/// Conjugate-gradient solve of  L x = rhs  under the operator above. The
/// right-hand side and the returned solution are both projected to zero mean
/// (L is singular on constants). On non-convergence the best iterate is
/// still returned and the report carries the final residual.
ScalarField solve_poisson_grid(const ScalarField& rhs, const SolverParams& params,
                               SolveReport* report = nullptr);

/// Splat of unit normals into a cell-centered vector field: trilinear
/// weights into the 8 surrounding cell centers, per-component accumulation,
/// normalized by the per-cell total weight. Untouched cells stay zero.
/// Deterministic for any thread count (points are binned by cell and each
/// cell gathers in point order).
std::vector<Vec3> splat_normals(const OrientedPointCloud& cloud, const GridSpec& spec);

/// Central-difference divergence of `field`, one-sided at the boundary,
/// pre-scaled by voxel_size^2 so it is a valid right-hand side for
/// solve_poisson_grid.
ScalarField divergence_rhs(const std::vector<Vec3>& field, const GridSpec& spec);

struct ReconstructReport {
  std::size_t dropped_points = 0;  // outside the grid volume
  double iso_value = 0.0;
  SolveReport solve;
};

/// Full densification: splat -> divergence -> Poisson solve -> iso-value at
/// the mean sampled field value -> marching cubes. Points outside the grid
/// volume are dropped (counted in the report); throws if nothing remains or
/// if all points share one cell.
TriangleMesh poisson_reconstruct(const OrientedPointCloud& cloud, const GridSpec& spec,
                                 const SolverParams& params,
                                 ReconstructReport* report = nullptr,
                                 ScalarField* field_out = nullptr);

}  // namespace occ::densify
