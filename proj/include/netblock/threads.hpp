#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace netblock::detail {

// Static block partition over [0, count). Each index writes only its own
// output slot, so the result is identical for any worker count.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const unsigned t = std::min<unsigned>(threads, static_cast<unsigned>(count));
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = count * w / t;
      const std::size_t hi = count * (w + 1) / t;
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// --threads 0 means auto; NETBLOCK_THREADS is the environment fallback.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NETBLOCK_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace netblock::detail
