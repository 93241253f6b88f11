#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pdcphase {

/// Runs fn(i) for i in [0, n) across hardware threads. Each index owns its
/// output slot, so results are identical to a serial loop. The first worker
/// exception is rethrown on the calling thread.
template <typename Fn>
void parallel_for_index(size_t n, Fn&& fn) {
    size_t workers = std::thread::hardware_concurrency();
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = std::min(workers, n);
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([w, n, workers, &fn, &error, &failed] {
            try {
                for (size_t i = w; i < n && !failed.load(std::memory_order_relaxed); i += workers)
                    fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace pdcphase
