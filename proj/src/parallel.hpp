#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bhz {

/// Runs fn(i) for i in [0, count) over contiguous chunks on `workers` threads.
/// If any call throws, the exception from the smallest failing index is
/// rethrown, so error reporting does not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const std::size_t nw = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(count, 1));
  if (nw == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  struct Failure {
    std::size_t index = 0;
    std::exception_ptr error;
  };
  std::vector<Failure> failures(nw);
  {
    std::vector<std::jthread> threads;
    threads.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) {
      const std::size_t begin = count * w / nw;
      const std::size_t end = count * (w + 1) / nw;
      threads.emplace_back([&, w, begin, end] {
        for (std::size_t i = begin; i < end; ++i) {
          try {
            fn(i);
          } catch (...) {
            failures[w] = {i, std::current_exception()};
            return;
          }
        }
      });
    }
  }
  for (const auto& f : failures)
    if (f.error) std::rethrow_exception(f.error);
}

}  // namespace bhz
