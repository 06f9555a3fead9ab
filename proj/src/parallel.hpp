#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace etlab::detail {

// Calls fn(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed by index and write only their own slot, so results never depend on
// scheduling. The lowest-index exception is rethrown after all workers join.
template <class F>
void parallel_for(int count, int threads, F&& fn) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace etlab::detail
