#pragma once

#include <cstddef>
#include <functional>

namespace hpfact {

// Worker count used by parallel_for. Results never depend on it: every
// parallel loop writes disjoint outputs and reduces in a fixed order.
void set_thread_count(int threads);
int thread_count();

// Calls body(begin, end) over a static partition of [0, count). Nested calls
// from inside a worker run serially on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace hpfact
