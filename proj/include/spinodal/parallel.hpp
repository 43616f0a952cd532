#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace spinodal {

/// Worker-thread budget: SPINODAL_THREADS if set and positive, else the
/// hardware concurrency (at least 1).
inline int thread_budget() {
  if (const char* env = std::getenv("SPINODAL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count) over contiguous blocks, one per worker.
/// Workers write to disjoint indices chosen by the caller, so results are
/// deterministic regardless of the thread count.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(thread_budget()), std::max<std::size_t>(count, 1));
  if (workers <= 1 || count < 256) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace spinodal
