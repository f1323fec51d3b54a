#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace proofsmith {

// Runs fn(i) for i in [0, count) on up to max_workers threads. If calls
// throw, the exception from the smallest index is rethrown after all
// workers finish.
template <typename Fn>
void parallel_for_each_index(std::size_t count, std::size_t max_workers, Fn&& fn) {
  if (count == 0) return;
  const std::size_t workers = std::max<std::size_t>(1, std::min(count, max_workers));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace proofsmith
