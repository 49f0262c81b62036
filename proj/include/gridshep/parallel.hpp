#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

// Row-partitioned parallel loop. Worker count comes from GRIDSHEP_THREADS
// when set (>= 1), otherwise the machine parallelism. Work items write to
// disjoint outputs, so results do not depend on the partitioning.

namespace gridshep {

inline std::size_t worker_count() {
    if (const char* env = std::getenv("GRIDSHEP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1)
            return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Invoke fn(begin, end) over a partition of [0, n).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t workers = std::min(worker_count(), n == 0 ? std::size_t{1} : n);
    if (workers <= 1 || n <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace gridshep
