#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cbo::detail {

/// Run body(i) for i in [0, n) across worker threads. Callers keep results in
/// slot-indexed storage so reductions stay deterministic regardless of
/// scheduling. n_threads <= 0 uses the hardware count. Rethrows the first
/// worker exception after joining.
inline void parallel_indices(long n, const std::function<void(long)>& body, int n_threads = 0) {
    if (n <= 0) return;
    if (n_threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        n_threads = hw == 0 ? 4 : static_cast<int>(hw);
    }
    const long workers = std::min<long>(n, n_threads);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (long t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            try {
                for (long i; (i = next.fetch_add(1)) < n;) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cbo::detail
