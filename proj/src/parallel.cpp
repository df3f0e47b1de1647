#include "hpfact/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace hpfact {

namespace {

std::atomic<int> g_threads{1};
thread_local bool t_inside_worker = false;

}  // namespace

void set_thread_count(int threads) { g_threads.store(std::max(1, threads)); }

int thread_count() { return g_threads.load(); }

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  const auto workers = static_cast<std::size_t>(thread_count());
  if (workers <= 1 || count < 2 || t_inside_worker) {
    body(0, count);
    return;
  }
  const std::size_t parts = std::min(workers, count);
  const std::size_t chunk = (count + parts - 1) / parts;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(parts);
  pool.reserve(parts);
  for (std::size_t t = 0; t < parts; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, t, begin, end] {
      t_inside_worker = true;
      try {
        body(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
      t_inside_worker = false;
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hpfact
