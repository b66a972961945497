#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace critnet {

/// Runs body(0) .. body(n_items - 1) across `workers` threads.  Each item
/// must depend only on its own index and write only to its own slot, so
/// results are identical for every worker count.  workers = 0 uses the
/// hardware concurrency; workers = 1 runs inline.
template <typename Body>
void parallel_for(std::uint64_t n_items, unsigned workers, Body&& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || n_items <= 1) {
    for (std::uint64_t i = 0; i < n_items; ++i) body(i);
    return;
  }
  if (workers > n_items) workers = static_cast<unsigned>(n_items);
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n_items) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace critnet
