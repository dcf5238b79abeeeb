#pragma once

#include <cstddef>
#include <functional>

namespace embclf {

// Thread count from the EMBCLF_THREADS environment variable, 1 if unset or
// unparsable. 0 in the variable means std::thread::hardware_concurrency().
unsigned default_thread_count();

// Calls body(begin, end) on contiguous chunks covering [0, n). With
// threads <= 1 runs inline. Chunks are disjoint, so bodies that write only
// to their own indices give results independent of the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace embclf
