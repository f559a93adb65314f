#pragma once

// Index-parallel loop over [0, count). Each index is processed exactly once
// by some worker; callers write results to per-index slots, so the outcome
// never depends on the number of workers or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracheat {

/// Worker count for `requested` (0 means hardware concurrency), at most `count`.
inline int resolve_workers(int requested, std::size_t count) {
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    w = std::max(w, 1);
    if (count < static_cast<std::size_t>(w)) w = static_cast<int>(std::max<std::size_t>(count, 1));
    return w;
}

/// fn(index, worker) for every index. The first exception thrown by any
/// worker is rethrown after all workers have stopped.
template <class F>
void parallel_for(std::size_t count, int workers, F&& fn) {
    const int w = resolve_workers(workers, count);
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i, 0);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&](int worker) {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i, worker);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w - 1));
    for (int k = 1; k < w; ++k) pool.emplace_back(body, k);
    body(0);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace fracheat
