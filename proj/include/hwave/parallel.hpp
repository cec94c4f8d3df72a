#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace hwave {

/// Thread cap for all data-parallel loops; 0 restores the default (machine
/// cores, or WAVECLI_THREADS when set).
void set_thread_count(int n);
int thread_count();

/// Runs f(i) for i in [begin, end). Each index must write only its own
/// outputs. The first exception thrown by any iteration is rethrown.
template <class F>
void parallel_for(std::size_t begin, std::size_t end, F&& f, std::size_t min_parallel = 4096) {
  if (end <= begin) return;
  const auto count = static_cast<long long>(end - begin);
#ifdef _OPENMP
  if (end - begin >= min_parallel && thread_count() > 1) {
    std::exception_ptr error;
    std::mutex mu;
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (long long k = 0; k < count; ++k) {
      try {
        f(begin + static_cast<std::size_t>(k));
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  (void)min_parallel;
  for (long long k = 0; k < count; ++k) f(begin + static_cast<std::size_t>(k));
}

}  // namespace hwave
