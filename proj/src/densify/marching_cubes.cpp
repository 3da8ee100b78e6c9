// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/densify/marching_cubes.hpp"

#include <array>
#include <unordered_map>

#include "occ/core/parallel.hpp"

namespace occ::densify {

namespace {

// Cube corner c sits at offset (c&1, c>>1&1, c>>2&1). Edges are listed per
// axis with the low corner first so both cubes sharing an edge interpolate
// identically.
constexpr std::array<std::array<int, 2>, 12> kEdges = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},  // x
    {0, 2}, {1, 3}, {4, 6}, {5, 7},  // y
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // z
}};

constexpr int edge_axis(int e) { return e / 4; }

// Face corner cycles, counter-clockwise when viewed from outside the cube.
constexpr std::array<std::array<int, 4>, 6> kFaceCycles = {{
    {0, 4, 6, 2},  // -x
    {1, 3, 7, 5},  // +x
    {0, 1, 5, 4},  // -y
    {2, 6, 7, 3},  // +y
    {0, 2, 3, 1},  // -z
    {4, 5, 7, 6},  // +z
}};

int edge_between(int a, int b) {
  for (int e = 0; e < 12; ++e)
    if ((kEdges[e][0] == a && kEdges[e][1] == b) ||
        (kEdges[e][0] == b && kEdges[e][1] == a))
      return e;
  return -1;
}

using CaseTriangles = std::vector<std::array<std::uint8_t, 3>>;

// Builds the triangulation for one sign pattern (bit c set = corner below
// iso). Face crossings are linked into loops on the cube surface and each
// loop is fan-triangulated. Segments run from the crossing entering a
// below-iso run to the crossing leaving it, which orients triangle normals
// toward the above-iso side.
CaseTriangles build_case(int mask) {
  std::array<int, 12> next;
  next.fill(-1);
  int crossings = 0;

  for (const auto& cycle : kFaceCycles) {
    bool inside[4];
    for (int i = 0; i < 4; ++i) inside[i] = (mask >> cycle[i]) & 1;
    for (int i = 0; i < 4; ++i) {
      if (!inside[i]) continue;
      if (inside[(i + 3) % 4]) continue;  // not the start of a run
      // Run of below-iso corners starting at i; find its end.
      int j = i;
      while (inside[(j + 1) % 4]) j = (j + 1) % 4;
      const int enter = edge_between(cycle[(i + 3) % 4], cycle[i]);
      const int leave = edge_between(cycle[j], cycle[(j + 1) % 4]);
      next[enter] = leave;
      ++crossings;
    }
  }
  (void)crossings;

  CaseTriangles tris;
  std::array<bool, 12> used;
  used.fill(false);
  for (int start = 0; start < 12; ++start) {
    if (next[start] < 0 || used[start]) continue;
    std::vector<std::uint8_t> loop;
    int e = start;
    do {
      loop.push_back(static_cast<std::uint8_t>(e));
      used[e] = true;
      e = next[e];
    } while (e != start && !used[e]);
    if (e != start || loop.size() < 3)
      throw Error("marching cubes: malformed case table (internal)");
    for (std::size_t i = 1; i + 1 < loop.size(); ++i)
      tris.push_back({loop[0], loop[i], loop[i + 1]});
  }
  return tris;
}

const std::array<CaseTriangles, 256>& case_table() {
  static const std::array<CaseTriangles, 256> table = [] {
    std::array<CaseTriangles, 256> t;
    for (int mask = 0; mask < 256; ++mask) t[mask] = build_case(mask);
    return t;
  }();
  return table;
}

}  // namespace

TriangleMesh marching_cubes(const ScalarField& field, double iso) {
  const GridSpec& spec = field.spec;
  spec.validate();
  if (field.values.size() != spec.count())
    throw Error("marching_cubes: field length mismatch");

  TriangleMesh mesh;
  const int H = spec.dims.x(), W = spec.dims.y(), Z = spec.dims.z();
  if (H < 2 || W < 2 || Z < 2) return mesh;

  const std::size_t sy = static_cast<std::size_t>(Z);
  const std::size_t sx = static_cast<std::size_t>(W) * Z;
  const std::array<std::size_t, 3> stride = {sx, sy, 1};

  const std::size_t n_cubes = static_cast<std::size_t>(H - 1) * (W - 1) * (Z - 1);
  const auto cube_cell = [&](std::size_t cube) {
    const int k = static_cast<int>(cube % (Z - 1));
    const int j = static_cast<int>((cube / (Z - 1)) % (W - 1));
    const int i = static_cast<int>(cube / ((Z - 1) * static_cast<std::size_t>(W - 1)));
    return Eigen::Vector3i(i, j, k);
  };

  const auto& table = case_table();

  // Per-chunk triangle lists keyed by global lattice edge; merged in chunk
  // order afterwards so results do not depend on the thread count.
  const std::size_t n_chunks = (n_cubes + kParallelChunk - 1) / kParallelChunk;
  std::vector<std::vector<std::array<std::uint64_t, 3>>> chunk_tris(n_chunks);

  parallel_for(n_cubes, [&](std::size_t begin, std::size_t end) {
    auto& out = chunk_tris[begin / kParallelChunk];
    for (std::size_t cube = begin; cube < end; ++cube) {
      const Eigen::Vector3i c = cube_cell(cube);
      const std::size_t base = spec.linear(c.x(), c.y(), c.z());
      int mask = 0;
      for (int corner = 0; corner < 8; ++corner) {
        const std::size_t idx = base + (corner & 1 ? sx : 0) +
                                (corner & 2 ? sy : 0) + (corner & 4 ? 1 : 0);
        if (field.values[idx] < iso) mask |= 1 << corner;
      }
      const auto& tris = table[mask];
      if (tris.empty()) continue;
      for (const auto& t : tris) {
        std::array<std::uint64_t, 3> keys;
        for (int v = 0; v < 3; ++v) {
          const int e = t[v];
          const int lo = kEdges[e][0];
          const std::size_t lo_idx = base + (lo & 1 ? sx : 0) + (lo & 2 ? sy : 0) +
                                     (lo & 4 ? 1 : 0);
          keys[v] = static_cast<std::uint64_t>(lo_idx) * 3 + edge_axis(e);
        }
        out.push_back(keys);
      }
    }
  });

  // Weld: first appearance in (chunk, emission) order defines vertex ids.
  std::unordered_map<std::uint64_t, std::int32_t> vertex_of;
  const double h = spec.voxel_size;
  for (const auto& tris : chunk_tris) {
    for (const auto& keys : tris) {
      std::array<std::int32_t, 3> tri;
      for (int v = 0; v < 3; ++v) {
        const auto [it, inserted] =
            vertex_of.emplace(keys[v], static_cast<std::int32_t>(mesh.vertices.size()));
        if (inserted) {
          const std::size_t lo_idx = keys[v] / 3;
          const int axis = static_cast<int>(keys[v] % 3);
          const std::size_t hi_idx = lo_idx + stride[axis];
          const double v_lo = field.values[lo_idx];
          const double v_hi = field.values[hi_idx];
          double t = (iso - v_lo) / (v_hi - v_lo);
          t = std::clamp(t, 0.0, 1.0);
          const Eigen::Vector3i cell = spec.unlinear(lo_idx);
          Vec3 p = spec.center(cell);
          p[axis] += t * h;
          mesh.vertices.push_back(p);
        }
        tri[v] = it->second;
      }
      mesh.triangles.push_back(tri);
    }
  }
  return mesh;
}

}  // namespace occ::densify
