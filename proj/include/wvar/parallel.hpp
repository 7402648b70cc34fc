#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wvar {

/// Process-wide default worker count (0 means hardware concurrency).
inline std::size_t& default_workers() {
  static std::size_t n = 0;
  return n;
}

inline std::size_t resolve_workers(std::size_t workers) {
  if (workers == 0) workers = default_workers();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  return workers;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks must write
/// only to their own slots; results are then independent of scheduling.
/// The first exception thrown by any task is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t workers = 0) {
  workers = std::min(resolve_workers(workers), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace wvar
