#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tordiss {

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is processed exactly once;
// callers write results into preallocated slots, so output order never depends on scheduling.
// The first exception thrown by any worker is rethrown after all workers finish.
template <class Body>
void parallel_for(int64_t n, unsigned jobs, Body&& body) {
  if (n <= 0) return;
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::min<int64_t>(n, 1024))));
  if (jobs == 1) {
    for (int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        while (true) {
          int64_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace tordiss
