#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hetsync {

/**
 * Runs fn(k) for k in [0, count) on up to `workers` threads. Work items are
 * claimed from a shared counter, so results must be written to per-index slots.
 * Exceptions are collected per index; the lowest-index one is rethrown.
 */
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(count);
    const unsigned threads =
        static_cast<unsigned>(std::min<std::size_t>(std::max(workers, 1U), std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                fn(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace hetsync
