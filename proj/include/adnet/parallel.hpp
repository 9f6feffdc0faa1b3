#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace adnet {

inline int thread_count() {
  if (const char* env = std::getenv("ADNET_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, n). Bodies must write to disjoint state; results
/// are then identical for any thread count, which keeps training bit-exact.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int nt = std::min(n, thread_count());
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += nt) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace adnet
