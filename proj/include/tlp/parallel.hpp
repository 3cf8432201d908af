#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace tlp {

/// Worker count: TLP_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least one).
inline unsigned thread_count()
{
    if (const char* env = std::getenv("TLP_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(lo, hi) over disjoint contiguous chunks of [begin, end). Results
/// must not depend on chunk scheduling; callers write only to their own range
/// or synchronize order-independent updates.
template<typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn, unsigned threads = thread_count())
{
    if (end <= begin)
        return;
    const std::size_t total = end - begin;
    const std::size_t workers = std::min<std::size_t>(threads, (total + 255) / 256);
    if (workers <= 1) {
        fn(begin, end);
        return;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    const std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([&, w, lo, hi] {
            try {
                if (lo < hi)
                    fn(lo, hi);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace tlp
