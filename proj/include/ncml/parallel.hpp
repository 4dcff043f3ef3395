#ifndef NCML_PARALLEL_HPP
#define NCML_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace ncml {

// Global worker count for kernel-assembly loops. Default 1; the CLI sets it
// from --jobs. Work items write to disjoint memory, so results are identical
// at any thread count.
int thread_count();
void set_thread_count(int n);

// Runs fn(i) for i in [0, n). Each index is processed exactly once; the
// per-index computation must not touch shared mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ncml

#endif  // NCML_PARALLEL_HPP
