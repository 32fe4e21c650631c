#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace srb {

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Tasks own disjoint output slots, so the result is independent
// of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (n == 0) return;
    unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace srb
