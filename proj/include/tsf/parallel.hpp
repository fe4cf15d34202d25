#ifndef TSF_PARALLEL_HPP
#define TSF_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tsf {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> n{1};
    return n;
}
// set on worker threads so nested loops run inline instead of oversubscribing
inline thread_local bool in_worker = false;
}  // namespace detail

// Worker count used by the parallel loops. Results never depend on this value:
// every loop writes into index-addressed slots and reductions run sequentially.
inline void set_threads(unsigned n) { detail::thread_setting() = std::max(1u, n); }
inline unsigned threads() { return detail::thread_setting().load(); }

// Calls body(i) for i in [0, n). Blocks are assigned statically; the first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned nthreads = threads()) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(std::max(1u, nthreads), n);
    if (workers == 1 || detail::in_worker) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::atomic<bool> stop{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            detail::in_worker = true;
            try {
                for (std::size_t i = begin; i < end && !stop.load(std::memory_order_relaxed); ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                stop = true;
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Evaluates f(i) for every index into a vector (order-preserving).
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, unsigned nthreads = threads()) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = f(i); }, nthreads);
    return out;
}

}  // namespace tsf

#endif  // TSF_PARALLEL_HPP
