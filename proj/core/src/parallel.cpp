#include "relcore/parallel.hpp"

#include <atomic>

#ifdef RELCORE_HAVE_OPENMP
#include <omp.h>
#endif

namespace relcore {

namespace {
std::atomic<std::size_t> g_threads{1};
}

void set_thread_count(std::size_t n) { g_threads = n == 0 ? 1 : n; }

std::size_t thread_count() { return g_threads; }

namespace detail {

void run_parallel(std::size_t n, void (*body)(void*, std::size_t), void* ctx) {
#ifdef RELCORE_HAVE_OPENMP
  const int threads = static_cast<int>(g_threads.load());
  if (threads > 1 && n > 1) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < count; ++i) body(ctx, static_cast<std::size_t>(i));
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(ctx, i);
}

}  // namespace detail
}  // namespace relcore
