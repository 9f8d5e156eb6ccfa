#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace symflow {

inline int default_thread_count() {
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp<unsigned>(hw, 1u, 16u));
}

/// Runs fn(thread_index, item_index) for every item in [0, n). Work items are
/// claimed from a shared counter, so fn must write results into per-item slots
/// when the caller needs a scheduling-independent result.
inline void parallel_for(std::size_t n, int n_threads,
                         const std::function<void(int, std::size_t)>& fn) {
    if (n == 0) return;
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(n)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(0, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (;;) {
                std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) break;
                fn(t, i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace symflow
