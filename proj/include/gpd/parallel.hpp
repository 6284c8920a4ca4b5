#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gpd {

/// Worker count: GP_DIRICHLET_THREADS when set to a positive integer, else
/// the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("GP_DIRICHLET_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(task) for task in [0, n_tasks) on up to thread_count() threads.
/// Tasks must write disjoint outputs. The first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n_tasks, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n_tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) body(t);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = w; t < n_tasks; t += workers) body(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gpd
