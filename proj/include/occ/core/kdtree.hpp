// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "occ/core/types.hpp"

namespace occ {

/// Static balanced kd-tree over 3D points.
///
/// Queries are read-only and safe from any number of threads. Equidistant
/// candidates are resolved toward the smaller point index, so results are
/// reproducible and independent of build or scheduling order.
class KdTree3 {
 public:
  struct Hit {
    std::size_t index = 0;
    double sq_dist = std::numeric_limits<double>::infinity();
  };

  KdTree3() = default;
  explicit KdTree3(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  /// Nearest neighbor; tree must be non-empty.
  Hit nearest(const Vec3& q) const;

  /// Indices of the k nearest points sorted by (distance, index).
  /// `exclude` (when != npos) is skipped, e.g. the query point itself.
  void knn(const Vec3& q, int k, std::vector<std::size_t>& out,
           std::size_t exclude = npos) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  struct Node {
    // Leaves hold [begin, end) into order_; inner nodes split on axis at mid.
    std::uint32_t begin = 0, end = 0;
    std::uint32_t left = 0, right = 0;
    double split = 0;
    std::int8_t axis = -1;  // -1 = leaf
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;  // permutation of point indices
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

}  // namespace occ
