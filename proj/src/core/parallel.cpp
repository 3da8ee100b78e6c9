// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/core/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

namespace occ {

namespace {

std::atomic<int> g_thread_count{0};

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace

void set_thread_count(int n) { g_thread_count.store(n < 0 ? 0 : n); }

int thread_count() {
  if (const char* env = std::getenv("OCC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const int n = g_thread_count.load();
  return n > 0 ? n : hardware_threads();
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t chunks = (n + kParallelChunk - 1) / kParallelChunk;
  const int workers = std::min<std::size_t>(thread_count(), chunks);
  if (workers <= 1) {
    // Keep the chunk granularity so per-chunk reductions group identically
    // for every thread count.
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = c * kParallelChunk;
      body(begin, std::min(begin + kParallelChunk, n));
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    try {
      for (;;) {
        const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
        if (c >= chunks) break;
        const std::size_t begin = c * kParallelChunk;
        body(begin, std::min(begin + kParallelChunk, n));
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
  if (n == 0) return 0.0;
  const std::size_t chunks = (n + kParallelChunk - 1) / kParallelChunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += term(i);
    partial[begin / kParallelChunk] = s;
  });
  double total = 0.0;
  for (const double p : partial) total += p;
  return total;
}

}  // namespace occ
