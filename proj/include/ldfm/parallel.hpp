#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ldfm {

/// 0 means one worker per hardware thread.
inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs task(k) for k in [0, tasks) on up to `workers` threads. Tasks are
/// claimed dynamically; callers that need determinism write results into
/// per-task slots and reduce them in index order afterwards. The first
/// exception (by task index) is rethrown after all threads join.
template <class Task>
void parallel_for(std::size_t tasks, std::size_t workers, Task&& task) {
  workers = std::min(resolve_workers(workers), tasks);
  std::vector<std::exception_ptr> errors(tasks);
  if (workers <= 1) {
    for (std::size_t k = 0; k < tasks; ++k) {
      try {
        task(k);
      } catch (...) {
        errors[k] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < tasks && !failed; k = next++) {
          try {
            task(k);
          } catch (...) {
            errors[k] = std::current_exception();
            failed = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ldfm
