#include "planarmvs/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace planarmvs {

void parallel_for_rows(int begin, int end, int threads, const std::function<void(int)> &fn) {
  const int n = end - begin;
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    for (int r = begin; r < end; ++r) fn(r);
    return;
  }

  std::atomic<int> next{begin};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= end || failed.load()) return;
      try {
        fn(r);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace planarmvs
