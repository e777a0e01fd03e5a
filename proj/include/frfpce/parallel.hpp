#ifndef FRFPCE_PARALLEL_HPP
#define FRFPCE_PARALLEL_HPP

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace frfpce {

/// Runs fn(i) for i in [0, n). With threads > 1, indices are processed by a
/// fixed block partition, so any writes keyed by index land in the same slot
/// regardless of thread count. The first exception thrown by a worker is
/// rethrown on the calling thread.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace frfpce

#endif
