#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace kinex::detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, n) over contiguous blocks. Each index is handled
// by exactly one thread, so per-index results do not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n / 256, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    // Interleaved blocks balance the triangular cost profile of the convolution.
    constexpr std::size_t kBlock = 64;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t start = w * kBlock; start < n; start += workers * kBlock) {
                const std::size_t stop = std::min(n, start + kBlock);
                for (std::size_t i = start; i < stop; ++i) {
                    body(i);
                }
            }
        });
    }
}

} // namespace kinex::detail
