#pragma once

// Minimal work-sharing loop: indices are claimed off an atomic counter so
// results land in caller-owned slots and the outcome is identical for any
// worker count.  The first exception thrown by any worker is rethrown.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qsearch {

inline int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  pool.reserve(spawn);
  for (std::size_t w = 0; w < spawn; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qsearch
