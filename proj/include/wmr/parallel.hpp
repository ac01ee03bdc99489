#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace wmr {

/// Worker count: RECOVERY_THREADS if set (>=1), else hardware concurrency.
inline int recovery_threads() {
  if (const char* env = std::getenv("RECOVERY_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(0..count-1) across recovery_threads() workers.  fn must only touch
/// per-index state; exceptions from workers are rethrown on the caller.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(count, recovery_threads());
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace wmr
