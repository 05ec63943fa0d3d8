#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace inclab {

/// Worker cap: INCOHERENCE_LAB_THREADS when set (minimum 1), otherwise the
/// machine core count.
inline int thread_cap() {
  if (const char* env = std::getenv("INCOHERENCE_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static-partition parallel loop. Each index is visited exactly once; the
/// callable must write results only to per-index slots so outcomes match the
/// sequential order regardless of thread count.
template <class F>
void parallel_for(int n, F&& fn) {
  const int threads = std::min(thread_cap(), std::max(1, n));
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([t, threads, n, &fn] {
      for (int i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace inclab
