#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace etsc {

// Thread budget for embarrassingly parallel loops (per-channel conversions,
// grid sweeps). ETSC_THREADS caps it; `fallback` is what a caller wants when
// the variable is unset (benchmarks pass 1 to keep timings stable).
inline unsigned thread_budget(unsigned fallback = 0) {
    if (const char* env = std::getenv("ETSC_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    if (fallback >= 1) return fallback;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(i) for i in [0, count). Work items must be independent; results
// written to disjoint slots stay deterministic regardless of thread count.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    unsigned nt = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += nt) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace etsc
