#include "cesarolab/parallel.hpp"

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cesarolab {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for_chunks(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t, int)>& body) {
  int nt = resolve_thread_count(threads);
  if (n == 0) return;
  if (static_cast<std::size_t>(nt) > n) nt = static_cast<int>(n);
  if (nt == 1) {
    body(0, n, 0);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  const std::size_t chunk = n / static_cast<std::size_t>(nt);
  const std::size_t rem = n % static_cast<std::size_t>(nt);
  std::size_t begin = 0;
  for (int w = 0; w < nt; ++w) {
    std::size_t len = chunk + (static_cast<std::size_t>(w) < rem ? 1 : 0);
    std::size_t end = begin + len;
    pool.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cesarolab
