// parallel.hpp — deterministic parallel map over an index range.
//
// Each index is written by exactly one worker and no reductions happen across
// workers, so results are bitwise identical for any thread count.

#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace scatterwork {

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
    const int nt = resolve_thread_count(threads);
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t workers = static_cast<std::size_t>(nt) < n ? static_cast<std::size_t>(nt) : n;
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    // rethrow the failure from the lowest block so the reported error is
    // independent of scheduling
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace scatterwork
