#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qf {

// worker cap from QF_THREADS, else hardware concurrency
inline unsigned worker_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QF_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = unsigned(v);
    }
    return hw;
}

// runs fn(i) for i in [0, count); results must be written to per-index slots so merging stays deterministic
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn)
{
    const unsigned workers = unsigned(std::min<std::size_t>(worker_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    pool.clear();
    if (err) std::rethrow_exception(err);
}

} // namespace qf
