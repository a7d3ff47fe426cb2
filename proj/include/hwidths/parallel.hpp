#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hwidths {

/// Thread cap from the HW_THREADS environment variable; 0 or unset means
/// auto (hardware concurrency).
inline unsigned thread_budget() {
    unsigned cap = 0;
    if (const char* env = std::getenv("HW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            cap = static_cast<unsigned>(v);
    }
    if (cap == 0) {
        cap = std::thread::hardware_concurrency();
        if (cap == 0)
            cap = 1;
    }
    return cap;
}

/// Runs fn(i) for i in [0, count). Work items must be independent; results
/// must not depend on execution order. Splits into contiguous chunks over at
/// most thread_budget() threads.
inline void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
    if (count <= 0)
        return;
    const unsigned threads =
        std::min<std::int64_t>(thread_budget(), count) > 1
            ? static_cast<unsigned>(std::min<std::int64_t>(thread_budget(), count))
            : 1;
    if (threads == 1) {
        for (std::int64_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::int64_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::int64_t lo = static_cast<std::int64_t>(t) * chunk;
        const std::int64_t hi = std::min(lo + chunk, count);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, &fn]() {
            for (std::int64_t i = lo; i < hi; ++i)
                fn(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

/// splitmix64 step, used to derive independent per-index seeds so that
/// parallel loops stay deterministic under any schedule.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace hwidths
