#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace diskrot {

/// Worker cap from DISKROT_THREADS, else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("DISKROT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, n_tasks) over a static contiguous partition.
/// Tasks write into their own slots; callers reduce in index order, so the
/// result never depends on the thread count. The first failing task (by
/// index) is rethrown.
template <class Task>
void parallel_for(std::size_t n_tasks, Task&& task) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n_tasks);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n_tasks);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n_tasks * w / workers;
        const std::size_t hi = n_tasks * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    task(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for shard `shard` of a run seeded with `seed`.
inline std::mt19937_64 shard_rng(std::uint64_t seed, std::uint64_t shard) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(shard + 0x632be59bd9b4e019ULL)));
}

/// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace diskrot
