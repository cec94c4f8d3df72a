#include "hwave/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace hwave {

namespace {

int default_threads() {
  if (const char* env = std::getenv("WAVECLI_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_threads{0};

}  // namespace

void set_thread_count(int n) { g_threads.store(n > 0 ? n : 0); }

int thread_count() {
  const int n = g_threads.load();
  return n > 0 ? n : default_threads();
}

}  // namespace hwave
