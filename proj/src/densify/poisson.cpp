// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/densify/poisson.hpp"

#include <cmath>
#include <numeric>

#include "occ/core/parallel.hpp"
#include "occ/densify/marching_cubes.hpp"

namespace occ::densify {

void SolverParams::validate() const {
  if (!(tolerance > 0) || !(tolerance < 1))
    throw Error("solver params: tolerance must be in (0, 1)");
  if (max_iterations < 1) throw Error("solver params: max_iterations must be >= 1");
}

ScalarField apply_laplacian(const ScalarField& x) {
  const GridSpec& spec = x.spec;
  const int H = spec.dims.x(), W = spec.dims.y(), Z = spec.dims.z();
  ScalarField out(spec);
  const std::size_t sy = static_cast<std::size_t>(Z);
  const std::size_t sx = static_cast<std::size_t>(W) * Z;
  parallel_for(spec.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Eigen::Vector3i c = spec.unlinear(idx);
      const double v = x.values[idx];
      double acc = 0.0;
      if (c.x() > 0) acc += x.values[idx - sx] - v;
      if (c.x() + 1 < H) acc += x.values[idx + sx] - v;
      if (c.y() > 0) acc += x.values[idx - sy] - v;
      if (c.y() + 1 < W) acc += x.values[idx + sy] - v;
      if (c.z() > 0) acc += x.values[idx - 1] - v;
      if (c.z() + 1 < Z) acc += x.values[idx + 1] - v;
      out.values[idx] = acc;
    }
  });
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
  const double s =
      parallel_sum(v.size(), [&](std::size_t i) { return v[i]; });
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return parallel_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

}  // namespace

ScalarField solve_poisson_grid(const ScalarField& rhs, const SolverParams& params,
                               SolveReport* report) {
  params.validate();
  rhs.spec.validate();
  if (rhs.values.size() != rhs.spec.count())
    throw Error("solve_poisson_grid: rhs length mismatch");
  for (const double v : rhs.values)
    if (!std::isfinite(v)) throw Error("solve_poisson_grid: non-finite rhs");

  const std::size_t n = rhs.values.size();

  // CG on A = -L (positive semidefinite); operate in the zero-mean subspace.
  ScalarField b_field(rhs.spec);
  const double rhs_mean = mean_of(rhs.values);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      b_field.values[i] = -(rhs.values[i] - rhs_mean);
  });

  ScalarField x(rhs.spec);
  std::vector<double> r = b_field.values;  // r = b - A*0
  std::vector<double> p = r;
  std::vector<double> ap(n);

  const double b_norm = std::sqrt(dot(b_field.values, b_field.values));
  SolveReport rep;
  if (b_norm == 0.0) {
    rep.converged = true;
    if (report) *report = rep;
    return x;
  }

  double rr = dot(r, r);
  ScalarField p_field(rhs.spec);
  for (int it = 0; it < params.max_iterations; ++it) {
    rep.relative_residual = std::sqrt(rr) / b_norm;
    if (rep.relative_residual <= params.tolerance) {
      rep.converged = true;
      break;
    }
    p_field.values = p;
    const ScalarField lap_p = apply_laplacian(p_field);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) ap[i] = -lap_p.values[i];
    });
    const double pap = dot(p, ap);
    if (!(pap > 0)) break;  // numerical breakdown (p in the nullspace)
    const double alpha = rr / pap;
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        x.values[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
    });
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) p[i] = r[i] + beta * p[i];
    });
    rep.iterations = it + 1;
    rep.relative_residual = std::sqrt(rr) / b_norm;
  }
  if (!rep.converged) rep.relative_residual = std::sqrt(dot(r, r)) / b_norm;

  // Rounding can drift the iterates off the zero-mean subspace.
  const double x_mean = mean_of(x.values);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) x.values[i] -= x_mean;
  });
  if (report) *report = rep;
  return x;
}

std::vector<Vec3> splat_normals(const OrientedPointCloud& cloud, const GridSpec& spec) {
  const std::size_t n = cloud.size();
  const int H = spec.dims.x(), W = spec.dims.y(), Z = spec.dims.z();

  // Base cell per point: the cell whose center is the low corner of the
  // trilinear stencil. Clamped to keep the 2x2x2 stencil in bounds; clamping
  // only moves points within half a voxel of the border.
  std::vector<std::uint32_t> base(n);
  std::vector<Eigen::Vector3d> frac(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Vec3 g = (cloud.cloud.positions[i] - spec.origin) / spec.voxel_size -
                     Vec3(0.5, 0.5, 0.5);
      int bi = static_cast<int>(std::floor(g.x()));
      int bj = static_cast<int>(std::floor(g.y()));
      int bk = static_cast<int>(std::floor(g.z()));
      bi = std::clamp(bi, 0, H - 2);
      bj = std::clamp(bj, 0, W - 2);
      bk = std::clamp(bk, 0, Z - 2);
      base[i] = static_cast<std::uint32_t>(spec.linear(bi, bj, bk));
      frac[i] = Vec3(std::clamp(g.x() - bi, 0.0, 1.0), std::clamp(g.y() - bj, 0.0, 1.0),
                     std::clamp(g.z() - bk, 0.0, 1.0));
    }
  });

  // Stable counting sort of points by base cell, so each output cell can
  // gather its contributions in a fixed order.
  const std::size_t cells = spec.count();
  std::vector<std::uint32_t> counts(cells + 1, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[base[i] + 1];
  for (std::size_t c = 0; c < cells; ++c) counts[c + 1] += counts[c];
  std::vector<std::uint32_t> order(n);
  {
    std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
    for (std::size_t i = 0; i < n; ++i) order[cursor[base[i]]++] = static_cast<std::uint32_t>(i);
  }

  std::vector<Vec3> field(cells, Vec3::Zero());

  parallel_for(cells, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const Eigen::Vector3i cc = spec.unlinear(c);
      Vec3 acc = Vec3::Zero();
      double wsum = 0.0;
      // Contributing points live in the 8 bins at cc - {0,1}^3.
      for (int di = 1; di >= 0; --di) {
        const int bi = cc.x() - di;
        if (bi < 0 || bi > H - 2) continue;
        for (int dj = 1; dj >= 0; --dj) {
          const int bj = cc.y() - dj;
          if (bj < 0 || bj > W - 2) continue;
          for (int dk = 1; dk >= 0; --dk) {
            const int bk = cc.z() - dk;
            if (bk < 0 || bk > Z - 2) continue;
            const std::size_t b = spec.linear(bi, bj, bk);
            for (std::uint32_t s = counts[b]; s < counts[b + 1]; ++s) {
              const std::uint32_t pt = order[s];
              const Vec3& f = frac[pt];
              const double wx = di ? f.x() : 1.0 - f.x();
              const double wy = dj ? f.y() : 1.0 - f.y();
              const double wz = dk ? f.z() : 1.0 - f.z();
              const double w = wx * wy * wz;
              acc += w * cloud.normals[pt];
              wsum += w;
            }
          }
        }
      }
      if (wsum > 0) field[c] = acc / wsum;
    }
  });
  return field;
}

ScalarField divergence_rhs(const std::vector<Vec3>& field, const GridSpec& spec) {
  if (field.size() != spec.count()) throw Error("divergence_rhs: field length mismatch");
  const int H = spec.dims.x(), W = spec.dims.y(), Z = spec.dims.z();
  const double h = spec.voxel_size;
  const std::size_t sy = static_cast<std::size_t>(Z);
  const std::size_t sx = static_cast<std::size_t>(W) * Z;
  ScalarField rhs(spec);
  parallel_for(spec.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Eigen::Vector3i c = spec.unlinear(idx);
      double div = 0.0;  // times h^2
      // d/dx, scaled by h^2: central (hi-lo)*h/2, one-sided (hi-lo)*h.
      const auto axis = [&](int coord, int dim, std::size_t stride, int a) {
        if (coord > 0 && coord + 1 < dim)
          div += (field[idx + stride][a] - field[idx - stride][a]) * (h * 0.5);
        else if (coord + 1 < dim)
          div += (field[idx + stride][a] - field[idx][a]) * h;
        else if (coord > 0)
          div += (field[idx][a] - field[idx - stride][a]) * h;
      };
      axis(c.x(), H, sx, 0);
      axis(c.y(), W, sy, 1);
      axis(c.z(), Z, 1, 2);
      rhs.values[idx] = div;
    }
  });
  return rhs;
}

TriangleMesh poisson_reconstruct(const OrientedPointCloud& cloud, const GridSpec& spec,
                                 const SolverParams& params,
                                 ReconstructReport* report, ScalarField* field_out) {
  cloud.validate();
  spec.validate();
  if (cloud.size() < 10)
    throw Error("poisson_reconstruct: need at least 10 points, got " +
                std::to_string(cloud.size()));

  OrientedPointCloud kept;
  ReconstructReport rep;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (spec.contains(cloud.cloud.positions[i])) {
      kept.cloud.push_back(cloud.cloud, i);
      kept.normals.push_back(cloud.normals[i]);
    } else {
      ++rep.dropped_points;
    }
  }
  if (kept.size() == 0)
    throw Error("poisson_reconstruct: no points inside the grid volume");
  {
    const Eigen::Vector3i first = spec.cell_of(kept.cloud.positions[0]);
    bool one_cell = true;
    for (const auto& p : kept.cloud.positions)
      if (spec.cell_of(p) != first) {
        one_cell = false;
        break;
      }
    if (one_cell)
      throw Error("poisson_reconstruct: degenerate input (all points in one cell)");
  }

  const std::vector<Vec3> field = splat_normals(kept, spec);
  const ScalarField rhs = divergence_rhs(field, spec);
  const ScalarField chi = solve_poisson_grid(rhs, params, &rep.solve);

  // Iso level: mean of the field sampled at the inputs, so the extracted
  // surface passes through the samples.
  const double iso =
      parallel_sum(kept.size(),
                   [&](std::size_t i) { return chi.sample(kept.cloud.positions[i]); }) /
      static_cast<double>(kept.size());
  rep.iso_value = iso;

  TriangleMesh mesh = marching_cubes(chi, iso);
  if (report) *report = rep;
  if (field_out) *field_out = chi;
  return mesh;
}

}  // namespace occ::densify
