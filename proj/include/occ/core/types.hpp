// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace occ {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base error type. Subtypes exist so the CLI can map failures to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Invalid configuration (bad JSON, out-of-range numeric field).
struct ConfigError : Error {
  using Error::Error;
};
/// Invalid scene bundle (manifest parse/validation, missing frame data).
struct SceneError : Error {
  using Error::Error;
};
/// Two grids that must share a GridSpec do not.
struct GridMismatchError : Error {
  using Error::Error;
};

/// SE(3) pose: p_out = rotation * p_in + translation.
///
/// Conventions used throughout: right-handed, z-up. Ego poses are stored as
/// world-from-ego, LiDAR extrinsics as ego-from-sensor, camera extrinsics as
/// camera-from-ego.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 operator()(const Vec3& p) const { return rotation * p + translation; }

  static RigidTransform identity() { return {}; }

  /// Max-norm of R^T R - I; 0 for a perfect rotation.
  double orthonormality_error() const {
    return ((rotation.transpose() * rotation) - Mat3::Identity())
        .cwiseAbs()
        .maxCoeff();
  }

  bool is_rigid(double tol = 1e-9) const {
    return orthonormality_error() <= tol && rotation.determinant() > 0.0;
  }
};

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

/// Point cloud in meters. Optional channels are either empty or exactly
/// size() long; `frame_indices` records the source-frame ordinal of each
/// point so per-frame sensor origins can be looked up later.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<std::uint16_t> labels;       // 0 = unlabeled
  std::vector<float> intensities;
  std::vector<std::uint32_t> frame_indices;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_intensities() const { return !intensities.empty(); }
  bool has_frame_indices() const { return !frame_indices.empty(); }

  /// Appends point i of `other` with whatever channels both sides carry.
  void push_back(const PointCloud& other, std::size_t i);
  void append(const PointCloud& other);
  void reserve(std::size_t n);

  /// Throws Error if channel lengths disagree or a position is non-finite.
  void validate() const;
};

/// 3D detection box. `size` is (length, width, height) with length along the
/// box +x (heading), width along +y, height along +z; yaw rotates box x into
/// the parent frame about +z.
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Zero();  // (l, w, h), all > 0
  double yaw = 0.0;
  std::string instance_id;
  std::uint16_t class_id = 0;

  /// parent-from-box transform (box origin at center, x along heading).
  RigidTransform pose() const;

  void validate() const;
};

/// True iff p lies inside the box inflated by `margin` on every side.
bool point_in_box(const Vec3& p, const OrientedBox& box, double margin = 0.0);

/// Dense voxel lattice. Voxel (i,j,k) covers the half-open cube
/// [origin + s*(i,j,k), origin + s*(i+1,j+1,k+1)); its center is at
/// origin + s*(i+1/2, j+1/2, k+1/2). Linear order is row-major: i, then j,
/// then k (k fastest).
struct GridSpec {
  Vec3 origin = Vec3::Zero();
  double voxel_size = 1.0;
  Eigen::Vector3i dims = Eigen::Vector3i::Zero();  // (H, W, Z)

  std::size_t count() const {
    return static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
  }
  std::size_t linear(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims.y() + j) * dims.z() + k;
  }
  Eigen::Vector3i unlinear(std::size_t idx) const {
    const int k = static_cast<int>(idx % dims.z());
    const int j = static_cast<int>((idx / dims.z()) % dims.y());
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(dims.y()) * dims.z()));
    return {i, j, k};
  }
  Vec3 center(int i, int j, int k) const {
    return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  Vec3 center(const Eigen::Vector3i& c) const {
    return center(c.x(), c.y(), c.z());
  }
  /// Cell containing p (may be out of bounds; check with in_bounds).
  Eigen::Vector3i cell_of(const Vec3& p) const {
    const Vec3 g = (p - origin) / voxel_size;
    return {static_cast<int>(std::floor(g.x())), static_cast<int>(std::floor(g.y())),
            static_cast<int>(std::floor(g.z()))};
  }
  bool in_bounds(const Eigen::Vector3i& c) const {
    return c.x() >= 0 && c.y() >= 0 && c.z() >= 0 && c.x() < dims.x() &&
           c.y() < dims.y() && c.z() < dims.z();
  }
  bool contains(const Vec3& p) const { return in_bounds(cell_of(p)); }
  Vec3 max_corner() const { return origin + voxel_size * dims.cast<double>(); }

  bool operator==(const GridSpec& o) const {
    return origin == o.origin && voxel_size == o.voxel_size && dims == o.dims;
  }

  void validate() const;

  /// Same origin, dims*f cells of size s/f. f >= 1.
  GridSpec refined(int factor) const;
};

/// Dense semantic voxel grid; label 0 means non-occupied.
struct LabelGrid {
  GridSpec spec;
  std::vector<std::uint16_t> labels;

  LabelGrid() = default;
  explicit LabelGrid(const GridSpec& s) : spec(s), labels(s.count(), 0) {}

  std::uint16_t& at(int i, int j, int k) { return labels[spec.linear(i, j, k)]; }
  std::uint16_t at(int i, int j, int k) const { return labels[spec.linear(i, j, k)]; }

  std::size_t occupied_count() const;

  void validate() const;
};

/// Pinhole camera. `extrinsic` maps ego coordinates to camera coordinates;
/// the camera looks along its +z axis.
struct CameraModel {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;
  RigidTransform extrinsic;

  void validate() const;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }

  double surface_area() const;
  /// Divergence-theorem volume; positive when triangle normals point outward.
  double signed_volume() const;
};

/// Cell-centered scalar samples over a grid.
struct ScalarField {
  GridSpec spec;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& s) : spec(s), values(s.count(), 0.0) {}

  double& at(int i, int j, int k) { return values[spec.linear(i, j, k)]; }
  double at(int i, int j, int k) const { return values[spec.linear(i, j, k)]; }

  /// Trilinear interpolation between cell centers, clamped at the border.
  double sample(const Vec3& p) const;
};

}  // namespace occ
