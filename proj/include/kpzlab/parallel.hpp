#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kpz {

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Split [0, n) into `threads` contiguous chunks and run body(begin, end, worker)
/// on each.  The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_chunks(std::size_t n, unsigned threads, Body body) {
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        body(std::size_t(0), n, 0u);
        return;
    }
    std::exception_ptr error;
    std::mutex mu;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        std::size_t b = n * w / threads, e = n * (w + 1) / threads;
        pool.emplace_back([&, b, e, w] {
            try {
                body(b, e, w);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace kpz
