#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spherepde {

/// Worker count from SPHEREPDE_THREADS (default 1, i.e. serial).
inline int env_thread_count() {
    const char* env = std::getenv("SPHEREPDE_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v < 1 ? 1 : v;
}

/// fn(i) for i in [0, count), possibly on a small thread pool.  Tasks must
/// write to disjoint locations; the first exception is rethrown.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
    const int threads = std::min(env_thread_count(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace spherepde
