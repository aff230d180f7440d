#include "hardyc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "hardyc/error.hpp"

namespace hardyc {

namespace {

std::atomic<unsigned> g_cap{0};

unsigned env_cap() {
  const char* v = std::getenv("HARDYC_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n <= 0) throw InputError("HARDYC_THREADS must be a positive integer, got '" + std::string(v) + "'");
  return static_cast<unsigned>(std::min<long>(n, 1024));
}

}  // namespace

unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  const unsigned cap = g_cap.load() != 0 ? g_cap.load() : env_cap();
  if (cap != 0) n = cap;
  return n;
}

void set_thread_cap(unsigned cap) { g_cap.store(cap); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block, hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace hardyc
