// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/voxel/voxelize.hpp"

#include <algorithm>
#include <thread>

#include "occ/core/parallel.hpp"

namespace occ::voxel {

namespace {

// Axis tests for the separating-axis triangle/box routine. Box is centered
// at the origin with half extents h; triangle vertices are pre-translated.
inline bool axis_separates(const Vec3& axis, const Vec3& v0, const Vec3& v1,
                           const Vec3& v2, const Vec3& h) {
  const double p0 = axis.dot(v0);
  const double p1 = axis.dot(v1);
  const double p2 = axis.dot(v2);
  const double r = h.x() * std::abs(axis.x()) + h.y() * std::abs(axis.y()) +
                   h.z() * std::abs(axis.z());
  const double lo = std::min({p0, p1, p2});
  const double hi = std::max({p0, p1, p2});
  return lo > r || hi < -r;
}

}  // namespace

bool triangle_intersects_box(const Vec3& tv0, const Vec3& tv1, const Vec3& tv2,
                             const Vec3& box_center, const Vec3& h) {
  const Vec3 v0 = tv0 - box_center;
  const Vec3 v1 = tv1 - box_center;
  const Vec3 v2 = tv2 - box_center;

  // 1) box axes
  for (int a = 0; a < 3; ++a) {
    const double lo = std::min({v0[a], v1[a], v2[a]});
    const double hi = std::max({v0[a], v1[a], v2[a]});
    if (lo > h[a] || hi < -h[a]) return false;
  }

  const Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;

  // 2) triangle plane
  const Vec3 n = e0.cross(e1);
  const double r = h.x() * std::abs(n.x()) + h.y() * std::abs(n.y()) +
                   h.z() * std::abs(n.z());
  if (std::abs(n.dot(v0)) > r) return false;

  // 3) nine edge cross products
  const Vec3 edges[3] = {e0, e1, e2};
  for (const Vec3& e : edges) {
    if (axis_separates(Vec3(0, -e.z(), e.y()), v0, v1, v2, h)) return false;
    if (axis_separates(Vec3(e.z(), 0, -e.x()), v0, v1, v2, h)) return false;
    if (axis_separates(Vec3(-e.y(), e.x(), 0), v0, v1, v2, h)) return false;
  }
  return true;
}

LabelGrid voxelize_mesh(const TriangleMesh& mesh, const GridSpec& spec,
                        MeshVoxelization mode) {
  spec.validate();
  for (const auto& v : mesh.vertices)
    if (!v.allFinite()) throw Error("voxelize_mesh: non-finite vertex");

  LabelGrid grid(spec);
  if (mesh.triangles.empty()) return grid;

  if (mode == MeshVoxelization::kSampled) {
    for (const auto& v : mesh.vertices) {
      const Eigen::Vector3i c = spec.cell_of(v);
      if (spec.in_bounds(c)) grid.labels[spec.linear(c.x(), c.y(), c.z())] = 1;
    }
    return grid;
  }

  // Per-thread masks merged by OR; the union over triangles is independent
  // of how the triangle range is partitioned.
  const std::size_t n_tris = mesh.triangles.size();
  const int workers =
      static_cast<int>(std::min<std::size_t>(thread_count(), (n_tris + 255) / 256));
  std::vector<std::vector<std::uint8_t>> masks(std::max(workers, 1));

  const Vec3 half = 0.5 * spec.voxel_size * Vec3::Ones();
  auto rasterize = [&](std::size_t begin, std::size_t end, std::vector<std::uint8_t>& mask) {
    mask.assign(spec.count(), 0);
    for (std::size_t t = begin; t < end; ++t) {
      const auto& tri = mesh.triangles[t];
      const Vec3& a = mesh.vertices[tri[0]];
      const Vec3& b = mesh.vertices[tri[1]];
      const Vec3& c = mesh.vertices[tri[2]];
      const Vec3 lo = a.cwiseMin(b).cwiseMin(c);
      const Vec3 hi = a.cwiseMax(b).cwiseMax(c);
      Eigen::Vector3i c_lo = spec.cell_of(lo);
      Eigen::Vector3i c_hi = spec.cell_of(hi);
      for (int ax = 0; ax < 3; ++ax) {
        c_lo[ax] = std::max(c_lo[ax], 0);
        c_hi[ax] = std::min(c_hi[ax], spec.dims[ax] - 1);
      }
      for (int i = c_lo.x(); i <= c_hi.x(); ++i)
        for (int j = c_lo.y(); j <= c_hi.y(); ++j)
          for (int k = c_lo.z(); k <= c_hi.z(); ++k) {
            const std::size_t idx = spec.linear(i, j, k);
            if (mask[idx]) continue;
            if (triangle_intersects_box(a, b, c, spec.center(i, j, k), half))
              mask[idx] = 1;
          }
    }
  };

  if (workers <= 1) {
    rasterize(0, n_tris, masks[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (n_tris + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n_tris, w * per);
      const std::size_t end = std::min(n_tris, begin + per);
      pool.emplace_back(rasterize, begin, end, std::ref(masks[w]));
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& mask : masks) {
    if (mask.empty()) continue;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) grid.labels[i] = 1;
  }
  return grid;
}

VoxelizePointsResult voxelize_points(const PointCloud& cloud, const GridSpec& spec) {
  spec.validate();
  cloud.validate();
  if (!cloud.has_labels()) throw Error("voxelize_points: cloud lacks labels");

  VoxelizePointsResult res;
  res.grid = LabelGrid(spec);

  const std::size_t n = cloud.size();
  constexpr std::uint32_t kSkip = 0xffffffffu;
  std::vector<std::uint32_t> cell(n);
  std::size_t unlabeled = 0, outside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cloud.labels[i] == 0) {
      ++unlabeled;
      cell[i] = kSkip;
      continue;
    }
    const Eigen::Vector3i c = spec.cell_of(cloud.positions[i]);
    if (!spec.in_bounds(c)) {
      ++outside;
      cell[i] = kSkip;
      continue;
    }
    cell[i] = static_cast<std::uint32_t>(spec.linear(c.x(), c.y(), c.z()));
  }
  res.unlabeled_rejected = unlabeled;
  res.outside = outside;

  // Stable counting sort by voxel, then a per-voxel majority vote.
  const std::size_t cells = spec.count();
  std::vector<std::uint32_t> counts(cells + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (cell[i] != kSkip) ++counts[cell[i] + 1];
  for (std::size_t c = 0; c < cells; ++c) counts[c + 1] += counts[c];
  std::vector<std::uint32_t> order(counts[cells]);
  {
    std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
    for (std::size_t i = 0; i < n; ++i)
      if (cell[i] != kSkip) order[cursor[cell[i]]++] = static_cast<std::uint32_t>(i);
  }

  parallel_for(cells, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint16_t> bucket;
    for (std::size_t c = begin; c < end; ++c) {
      const std::uint32_t lo = counts[c], hi = counts[c + 1];
      if (lo == hi) continue;
      bucket.clear();
      for (std::uint32_t s = lo; s < hi; ++s) bucket.push_back(cloud.labels[order[s]]);
      std::sort(bucket.begin(), bucket.end());
      // Longest run; first (= smallest label) wins ties.
      std::uint16_t best = bucket[0];
      std::size_t best_count = 0;
      for (std::size_t s = 0; s < bucket.size();) {
        std::size_t e = s;
        while (e < bucket.size() && bucket[e] == bucket[s]) ++e;
        if (e - s > best_count) {
          best_count = e - s;
          best = bucket[s];
        }
        s = e;
      }
      res.grid.labels[c] = best;
    }
  });
  return res;
}

PointCloud occupancy_to_points(const LabelGrid& grid) {
  grid.validate();
  PointCloud cloud;
  for (std::size_t idx = 0; idx < grid.labels.size(); ++idx) {
    if (grid.labels[idx] == 0) continue;
    cloud.positions.push_back(grid.spec.center(grid.spec.unlinear(idx)));
    cloud.labels.push_back(grid.labels[idx]);
  }
  return cloud;
}

}  // namespace occ::voxel
