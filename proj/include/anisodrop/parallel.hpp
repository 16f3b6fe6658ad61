#pragma once

#include <thread>
#include <vector>

namespace anisodrop {

/// Worker cap honoring ANISODROP_THREADS.
int worker_count();

/// Index-parallel map; workers write disjoint indices so callers reduce in
/// index order and results do not depend on the thread count.
template <class F>
void parallel_for(int n, F&& f) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&f, w, n, workers] {
      for (int i = w; i < n; i += workers) f(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace anisodrop
