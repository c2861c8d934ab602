#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace vqht {

/// Worker count: explicit request, else VQHT_THREADS, else hardware concurrency.
inline int worker_count(int requested = 0)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VQHT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed in index order; callers store results by index so output order
/// never depends on scheduling. The first exception is rethrown.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn)
{
    const int n = std::min(std::max(1, threads), std::max(1, count));
    if (n <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace vqht
