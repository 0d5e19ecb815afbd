#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "partpq/metrics.hpp"

namespace partpq {

// Runs fn(i) for i in [0, n) on `workers` threads. Work items must be
// independent; exceptions propagate from the first failing item.
template <class Fn>
inline void parallel_for(int64_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = int(std::min<int64_t>(workers, n));
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Deterministic pairwise reduction. The tree shape depends only on the input
// order, so per-class floating-point sums are identical for any worker count
// as long as results are stored by index.
inline AccumulatorMap fold_tree(std::span<const AccumulatorMap> items) {
  if (items.empty()) return {};
  if (items.size() == 1) return items.front();
  const size_t mid = items.size() / 2;
  return combine(fold_tree(items.subspan(0, mid)), fold_tree(items.subspan(mid)));
}

}  // namespace partpq
