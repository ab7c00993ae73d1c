#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace steklame::detail {

// Runs body(i) for i in [0, count) on at most `threads` workers, each taking
// a contiguous block. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
  const int workers = std::clamp(threads, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const int begin = static_cast<int>(static_cast<long long>(count) * w / workers);
      const int end = static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
      try {
        for (int i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace steklame::detail
