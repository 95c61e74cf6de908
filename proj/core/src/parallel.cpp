#include "kramers/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kramers {
namespace {

std::atomic<unsigned> g_override{0};

unsigned from_environment() {
  const char* raw = std::getenv("KRAMERS_RING_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const long value = std::stol(raw);
    return value > 0 ? static_cast<unsigned>(value) : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

unsigned default_thread_count() {
  if (const unsigned forced = g_override.load()) return forced;
  if (const unsigned env = from_environment()) return env;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(unsigned threads) { g_override.store(threads); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(default_thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(drain);
  drain();
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kramers
