#pragma once

#include <cstddef>
#include <functional>

namespace hardyc {

/// Worker count: hardware concurrency, capped by HARDYC_THREADS (a positive
/// integer) or by set_thread_cap. Throws InputError for a malformed variable.
unsigned thread_count();

/// Overrides the cap for this process; 0 restores the environment default.
void set_thread_cap(unsigned cap);

/// Runs fn(i) for i in [0, n) on up to thread_count() threads, in contiguous
/// blocks. fn must only write to per-index storage.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hardyc
