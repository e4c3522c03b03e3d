#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace fluxpop {

// Runs fn(begin, end) over contiguous index blocks on up to `threads` threads.
// Blocks are disjoint, so results are identical for any thread count as long
// as fn does not reduce across blocks.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count < 2) {
        fn(std::size_t{0}, count);
        return;
    }
    auto n_threads = static_cast<std::size_t>(threads);
    if (n_threads > count) {
        n_threads = count;
    }
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) {
        const std::size_t begin = i * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace fluxpop
