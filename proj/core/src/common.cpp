#include "muskat/common.hpp"

#include <atomic>
#include <sstream>

namespace muskat {

namespace threads {

namespace {
int hardware_default() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}
std::atomic<int> g_threads{0};  // 0 = hardware default
}  // namespace

int get() {
  const int n = g_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : hardware_default();
}

void set(int n) { g_threads.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace threads

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads::get()), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& th : pool) th.join();
}

void require_finite(const std::vector<double>& v, const std::string& context) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << context << ": non-finite value at flat index " << i;
      throw data_error(msg.str());
    }
  }
}

}  // namespace muskat
