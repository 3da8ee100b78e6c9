// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/core/types.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace occ {

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

RigidTransform invert(const RigidTransform& t) {
  RigidTransform out;
  out.rotation = t.rotation.transpose();
  out.translation = -(out.rotation * t.translation);
  return out;
}

void PointCloud::push_back(const PointCloud& other, std::size_t i) {
  positions.push_back(other.positions[i]);
  if (other.has_labels()) labels.push_back(other.labels[i]);
  if (other.has_intensities()) intensities.push_back(other.intensities[i]);
  if (other.has_frame_indices()) frame_indices.push_back(other.frame_indices[i]);
}

void PointCloud::append(const PointCloud& other) {
  positions.insert(positions.end(), other.positions.begin(), other.positions.end());
  if (other.has_labels())
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  if (other.has_intensities())
    intensities.insert(intensities.end(), other.intensities.begin(),
                       other.intensities.end());
  if (other.has_frame_indices())
    frame_indices.insert(frame_indices.end(), other.frame_indices.begin(),
                         other.frame_indices.end());
}

void PointCloud::reserve(std::size_t n) {
  positions.reserve(n);
  labels.reserve(labels.empty() ? 0 : n);
  intensities.reserve(intensities.empty() ? 0 : n);
  frame_indices.reserve(frame_indices.empty() ? 0 : n);
}

void PointCloud::validate() const {
  const std::size_t n = positions.size();
  if (!labels.empty() && labels.size() != n)
    throw Error("point cloud: labels length " + std::to_string(labels.size()) +
                " != positions length " + std::to_string(n));
  if (!intensities.empty() && intensities.size() != n)
    throw Error("point cloud: intensities length mismatch");
  if (!frame_indices.empty() && frame_indices.size() != n)
    throw Error("point cloud: frame_indices length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!positions[i].allFinite())
      throw Error("point cloud: non-finite position at index " + std::to_string(i));
  }
}

RigidTransform OrientedBox::pose() const {
  RigidTransform t;
  const double c = std::cos(yaw), s = std::sin(yaw);
  t.rotation << c, -s, 0, s, c, 0, 0, 0, 1;
  t.translation = center;
  return t;
}

void OrientedBox::validate() const {
  if (!(size.x() > 0 && size.y() > 0 && size.z() > 0))
    throw Error("box '" + instance_id + "': size components must be positive");
  if (!center.allFinite() || !std::isfinite(yaw))
    throw Error("box '" + instance_id + "': non-finite pose");
}

bool point_in_box(const Vec3& p, const OrientedBox& box, double margin) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const Vec3 d = p - box.center;
  // R(-yaw) * d
  const double qx = c * d.x() + s * d.y();
  const double qy = -s * d.x() + c * d.y();
  const double qz = d.z();
  return std::abs(qx) <= 0.5 * box.size.x() + margin &&
         std::abs(qy) <= 0.5 * box.size.y() + margin &&
         std::abs(qz) <= 0.5 * box.size.z() + margin;
}

void GridSpec::validate() const {
  if (dims.x() < 1 || dims.y() < 1 || dims.z() < 1)
    throw Error("grid spec: dims must all be >= 1, got (" +
                std::to_string(dims.x()) + ", " + std::to_string(dims.y()) + ", " +
                std::to_string(dims.z()) + ")");
  if (!(voxel_size > 0) || !std::isfinite(voxel_size))
    throw Error("grid spec: voxel_size must be positive");
  if (!origin.allFinite()) throw Error("grid spec: non-finite origin");
}

GridSpec GridSpec::refined(int factor) const {
  if (factor < 1) throw Error("grid refinement factor must be >= 1");
  GridSpec out = *this;
  out.voxel_size = voxel_size / factor;
  out.dims = dims * factor;
  return out;
}

std::size_t LabelGrid::occupied_count() const {
  std::size_t n = 0;
  for (const auto l : labels) n += (l != 0);
  return n;
}

void LabelGrid::validate() const {
  spec.validate();
  if (labels.size() != spec.count())
    throw Error("label grid: labels length " + std::to_string(labels.size()) +
                " != H*W*Z = " + std::to_string(spec.count()));
}

void CameraModel::validate() const {
  if (!(fx > 0) || !(fy > 0)) throw Error("camera: fx and fy must be positive");
  if (width < 1 || height < 1) throw Error("camera: image size must be >= 1");
}

double TriangleMesh::surface_area() const {
  double area = 0.0;
  for (const auto& t : triangles) {
    const Vec3& a = vertices[t[0]];
    const Vec3& b = vertices[t[1]];
    const Vec3& c = vertices[t[2]];
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

double TriangleMesh::signed_volume() const {
  double vol = 0.0;
  for (const auto& t : triangles) {
    const Vec3& a = vertices[t[0]];
    const Vec3& b = vertices[t[1]];
    const Vec3& c = vertices[t[2]];
    vol += a.dot(b.cross(c)) / 6.0;
  }
  return vol;
}

double ScalarField::sample(const Vec3& p) const {
  // Continuous cell-center coordinates, clamped so the 8-cell stencil stays
  // inside the lattice.
  Vec3 g = (p - spec.origin) / spec.voxel_size - Vec3(0.5, 0.5, 0.5);
  for (int a = 0; a < 3; ++a)
    g[a] = std::min(std::max(g[a], 0.0), static_cast<double>(spec.dims[a] - 1));
  int i0 = std::min(static_cast<int>(g.x()), spec.dims.x() - 2);
  int j0 = std::min(static_cast<int>(g.y()), spec.dims.y() - 2);
  int k0 = std::min(static_cast<int>(g.z()), spec.dims.z() - 2);
  i0 = std::max(i0, 0);
  j0 = std::max(j0, 0);
  k0 = std::max(k0, 0);
  const double fx = g.x() - i0, fy = g.y() - j0, fz = g.z() - k0;
  const int i1 = std::min(i0 + 1, spec.dims.x() - 1);
  const int j1 = std::min(j0 + 1, spec.dims.y() - 1);
  const int k1 = std::min(k0 + 1, spec.dims.z() - 1);
  const double c000 = at(i0, j0, k0), c100 = at(i1, j0, k0);
  const double c010 = at(i0, j1, k0), c110 = at(i1, j1, k0);
  const double c001 = at(i0, j0, k1), c101 = at(i1, j0, k1);
  const double c011 = at(i0, j1, k1), c111 = at(i1, j1, k1);
  const double c00 = c000 * (1 - fx) + c100 * fx;
  const double c10 = c010 * (1 - fx) + c110 * fx;
  const double c01 = c001 * (1 - fx) + c101 * fx;
  const double c11 = c011 * (1 - fx) + c111 * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

}  // namespace occ
