#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace graphon {

// Worker cap: GRAPHON_LDP_THREADS if set, else hardware concurrency.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("GRAPHON_LDP_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(i) for i in [0, count). fn must write only to slot i of any shared
// output, which keeps results identical for every thread count.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    unsigned workers = std::min<std::size_t>(thread_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace graphon
