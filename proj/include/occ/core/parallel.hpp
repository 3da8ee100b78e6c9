// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <vector>

namespace occ {

/// Sets the worker count used by parallel_for / parallel_sum. 0 restores the
/// hardware default. The OCC_THREADS environment variable, when set, takes
/// precedence over this value.
void set_thread_count(int n);

/// Resolved worker count (>= 1).
int thread_count();

/// Work is cut into fixed-size chunks (independent of the worker count) and
/// handed to workers as [begin, end) ranges. Writes into disjoint output
/// slots therefore produce identical results for any thread count; ordered
/// reductions over the chunk index do too.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

/// Deterministic floating-point reduction: per-chunk partial sums are
/// accumulated left-to-right within a chunk and merged in chunk order, so the
/// result is bit-identical for any thread count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Chunk granularity shared by the helpers above. Fixed so that results do
/// not depend on how many workers execute the chunks.
inline constexpr std::size_t kParallelChunk = 8192;

}  // namespace occ
