#include "cq/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cq {

int worker_count() {
  if (const char* env = std::getenv("CQ_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // fall through to hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_jobs(long long count, const std::function<void(long long)>& fn) {
  if (count <= 0) return;
  const int workers =
      static_cast<int>(std::min<long long>(worker_count(), count));
  if (workers <= 1) {
    for (long long j = 0; j < count; ++j) fn(j);
    return;
  }

  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const long long j = next.fetch_add(1);
      if (j >= count) return;
      try {
        fn(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace cq
