#ifndef SWREG_PARALLEL_HPP
#define SWREG_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace swreg {

// Worker count from SWREG_WORKERS, default 1.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SWREG_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

// Runs body(i) for i in [0, count). Each index writes only to its own slot in
// the caller's result buffer, so the outcome is independent of the worker
// count; any reduction must happen afterwards in index order.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    unsigned workers = worker_count();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    if (workers > count) workers = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace swreg

#endif
