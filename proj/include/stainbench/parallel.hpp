#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace stainbench {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static index-space map over independent tasks. Results must be written to
/// per-index slots; the chunk assignment is fixed so worker count never
/// changes which task runs which index.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const int width = static_cast<int>(
        std::min(static_cast<std::size_t>(resolve_threads(threads)), n));
    if (width <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (int t = 0; t < width; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += width) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace stainbench
