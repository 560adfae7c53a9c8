#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qvdp {

/// Runs f(i) for i in [0, n) on `workers` threads pulling indices from a
/// shared counter. Results must be written to per-index slots by f; the
/// first exception thrown by any task is rethrown after all threads join.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  const std::size_t nthreads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t w = 0; w < nthreads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace qvdp
