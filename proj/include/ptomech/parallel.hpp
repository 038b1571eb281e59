#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ptomech {

/// Worker-count default: PTOMECH_WORKERS env var, else hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("PTOMECH_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(i) for i in [0, n).  Each index computes independently and writes
/// only its own output slot, so results are identical for any worker count.
template <class Fn>
inline void parallel_for(long n, int workers, Fn&& fn) {
  if (n <= 0) return;
  workers = std::max(1, workers);
  if (static_cast<long>(workers) > n) workers = static_cast<int>(n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ptomech
