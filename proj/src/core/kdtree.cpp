// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/core/kdtree.hpp"

#include <algorithm>
#include <queue>

namespace occ {

namespace {
constexpr std::uint32_t kLeafSize = 16;

inline double sq_norm(const Vec3& d) {
  return d.x() * d.x() + d.y() * d.y() + d.z() * d.z();
}
}  // namespace

KdTree3::KdTree3(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::uint32_t KdTree3::build(std::uint32_t begin, std::uint32_t end) {
  const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  // Split at the median of the widest axis; ties in the sort key are broken
  // by point index so the layout is reproducible.
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id].axis = static_cast<std::int8_t>(axis);
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

KdTree3::Hit KdTree3::nearest(const Vec3& q) const {
  if (points_.empty()) throw Error("kd-tree: nearest() on empty tree");
  Hit best;
  // Explicit stack; entries carry the node and the squared distance from q to
  // that subtree's splitting slab.
  struct Frame {
    std::uint32_t node;
    double sq_bound;
  };
  std::vector<Frame> stack;
  stack.push_back({root_, 0.0});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.sq_bound > best.sq_dist) continue;
    const Node& n = nodes_[f.node];
    if (n.axis < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t idx = order_[i];
        const double d = sq_norm(points_[idx] - q);
        if (d < best.sq_dist || (d == best.sq_dist && idx < best.index)) {
          best.sq_dist = d;
          best.index = idx;
        }
      }
      continue;
    }
    const double delta = q[n.axis] - n.split;
    const std::uint32_t near = delta < 0 ? n.left : n.right;
    const std::uint32_t far = delta < 0 ? n.right : n.left;
    stack.push_back({far, std::max(f.sq_bound, delta * delta)});
    stack.push_back({near, f.sq_bound});
  }
  return best;
}

void KdTree3::knn(const Vec3& q, int k, std::vector<std::size_t>& out,
                  std::size_t exclude) const {
  out.clear();
  if (k <= 0 || points_.empty()) return;
  using Entry = std::pair<double, std::size_t>;  // (sq dist, index)
  // Max-heap ordered lexicographically so the retained set is unique even
  // with ties at the boundary.
  auto worse = [](const Entry& a, const Entry& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

  struct Frame {
    std::uint32_t node;
    double sq_bound;
  };
  std::vector<Frame> stack;
  stack.push_back({root_, 0.0});
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (heap.size() == static_cast<std::size_t>(k) && f.sq_bound > heap.top().first)
      continue;
    const Node& n = nodes_[f.node];
    if (n.axis < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const std::uint32_t idx = order_[i];
        if (idx == exclude) continue;
        const Entry e{sq_norm(points_[idx] - q), idx};
        if (heap.size() < static_cast<std::size_t>(k)) {
          heap.push(e);
        } else if (worse(e, heap.top())) {
          heap.pop();
          heap.push(e);
        }
      }
      continue;
    }
    const double delta = q[n.axis] - n.split;
    const std::uint32_t near = delta < 0 ? n.left : n.right;
    const std::uint32_t far = delta < 0 ? n.right : n.left;
    stack.push_back({far, std::max(f.sq_bound, delta * delta)});
    stack.push_back({near, f.sq_bound});
  }
  std::vector<Entry> entries;
  entries.reserve(heap.size());
  while (!heap.empty()) {
    entries.push_back(heap.top());
    heap.pop();
  }
  std::sort(entries.begin(), entries.end());
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.second);
}

}  // namespace occ
