#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace pyroscale {

// Runs run(begin, end) over a contiguous partition of [0, n), one worker
// thread per chunk; jobs <= 1 runs inline.  Callers write results into
// per-index slots keyed by the replica index, so output is identical for any
// job count.
inline void parallel_for(std::int64_t n, unsigned jobs,
                         const std::function<void(std::int64_t, std::int64_t)>& run) {
    if (n <= 0) return;
    if (jobs <= 1 || n == 1) {
        run(0, n);
        return;
    }
    const auto workers =
        static_cast<unsigned>(std::min<std::int64_t>(jobs, n));
    const std::int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::int64_t begin = static_cast<std::int64_t>(w) * chunk;
        const std::int64_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run, begin, end);
    }
    for (auto& th : pool) th.join();
}

} // namespace pyroscale
