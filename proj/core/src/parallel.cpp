#include "mcporo/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "mcporo/error.hpp"

namespace mcporo {

int worker_count_from_env(int fallback) {
  const char* raw = std::getenv("MCPORO_WORKERS");
  if (raw == nullptr || *raw == '\0') return std::max(1, fallback);
  try {
    return std::max(1, std::stoi(raw));
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, std::string("MCPORO_WORKERS is not an integer: ") + raw);
  }
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto run = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        fn(k);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(workers, 1, n);
  if (threads == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace mcporo
