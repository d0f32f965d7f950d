#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace relcore {

/// Caps worker threads for all data-parallel loops in the library (minimum 1).
void set_thread_count(std::size_t n);
std::size_t thread_count();

namespace detail {
void run_parallel(std::size_t n, void (*body)(void*, std::size_t), void* ctx);
}

/// Runs fn(i) for i in [0, n). Iterations must write disjoint state; results are then
/// identical for every thread count. The first exception thrown is rethrown after the loop.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  struct Ctx {
    Fn* fn;
    std::exception_ptr error;
    std::mutex mu;
  } ctx{&fn, nullptr, {}};
  detail::run_parallel(
      n,
      [](void* p, std::size_t i) {
        auto* c = static_cast<Ctx*>(p);
        try {
          (*c->fn)(i);
        } catch (...) {
          std::lock_guard lock(c->mu);
          if (!c->error) c->error = std::current_exception();
        }
      },
      &ctx);
  if (ctx.error) std::rethrow_exception(ctx.error);
}

}  // namespace relcore
