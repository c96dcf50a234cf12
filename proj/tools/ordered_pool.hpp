#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace bhzcli {

/// Runs produce(i) for i in [0, count) on a worker pool and hands results to
/// consume(i, result) on the calling thread in index order. If a job throws,
/// consumption stops at that index and the exception is rethrown.
template <typename Result, typename Produce, typename Consume>
void run_ordered(std::size_t count, int workers, Produce produce, Consume consume) {
  struct Slot {
    std::optional<Result> value;
    std::exception_ptr error;
    bool done = false;
  };
  std::vector<Slot> slots(count);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || stop.load()) return;
      Slot local;
      try {
        local.value.emplace(produce(i));
      } catch (...) {
        local.error = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        slots[i].value = std::move(local.value);
        slots[i].error = local.error;
        slots[i].done = true;
      }
      ready.notify_all();
    }
  };

  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(work);

  std::exception_ptr failure;
  for (std::size_t i = 0; i < count && !failure; ++i) {
    Slot slot;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return slots[i].done; });
      slot.value = std::move(slots[i].value);
      slot.error = slots[i].error;
    }
    if (slot.error) {
      failure = slot.error;
      break;
    }
    try {
      consume(i, std::move(*slot.value));
    } catch (...) {
      failure = std::current_exception();
    }
  }
  if (failure) stop.store(true);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bhzcli
