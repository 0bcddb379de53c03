#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pllab {

// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware count)
// and returns the results in input order, so the output is independent of
// the scheduling.  Exceptions are captured per index and the one with the
// smallest index is rethrown after all workers join.
template <typename Fn>
auto parallel_map(std::size_t n, int jobs, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{0}))> {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  if (n == 0) return out;

  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  if (workers > n) workers = static_cast<unsigned>(n);

  std::vector<std::exception_ptr> errs(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto body = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < n; ++i)
    if (errs[i]) std::rethrow_exception(errs[i]);
  return out;
}

}  // namespace pllab
