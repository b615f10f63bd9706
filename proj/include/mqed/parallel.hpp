#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mqed {

// Static-partition parallel loop; results must be written to caller-owned
// per-index slots so the assembly order is deterministic.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mqed
