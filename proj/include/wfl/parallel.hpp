#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace wfl {

namespace detail {
inline std::atomic<unsigned>& worker_count() {
    static std::atomic<unsigned> n{std::max(1u, std::thread::hardware_concurrency())};
    return n;
}
}  // namespace detail

inline void set_worker_threads(unsigned n) { detail::worker_count() = std::max(1u, n); }
inline unsigned worker_threads() { return detail::worker_count(); }

/// Runs body(i) for i in [0, n) over contiguous chunks. Callers must keep
/// iterations independent; the result then does not depend on the pool size.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 1024) {
    unsigned t = worker_threads();
    if (t <= 1 || n < 2 * min_chunk) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t chunks = std::min<std::size_t>(t, n / min_chunk);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace wfl
