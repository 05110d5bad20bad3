#ifndef PFS_PARALLEL_HPP
#define PFS_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace pfs {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs body(i) for i in [0, n). Each index must write only to its own slot so
// the result is identical for any thread count.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    // If bodies throw, rethrow the exception from the smallest failing index
    // so failures are independent of the thread count too.
    std::vector<std::exception_ptr> errors(nw);
    std::vector<std::size_t> error_index(nw, std::numeric_limits<std::size_t>::max());
    for (std::size_t w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += nw) {
                try {
                    body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    error_index[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    std::size_t first = std::numeric_limits<std::size_t>::max();
    std::exception_ptr to_throw;
    for (std::size_t w = 0; w < nw; ++w) {
        if (errors[w] && error_index[w] < first) {
            first = error_index[w];
            to_throw = errors[w];
        }
    }
    if (to_throw) std::rethrow_exception(to_throw);
}

}  // namespace pfs

#endif
