#ifndef CAVITYFORGE_PARALLEL_HPP
#define CAVITYFORGE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cavityforge
{

// Worker count: explicit request, else $CAVITYFORGE_THREADS, else all cores.
unsigned resolve_threads(unsigned requested = 0);

// Calls body(i) for i in [0, n). Each index writes only its own output slot,
// so results do not depend on the worker count. The exception thrown for the
// lowest index is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body)
{
    const auto workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n == 0 ? 1 : n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = n;

    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(run);
    }
    run();
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace cavityforge

#endif // CAVITYFORGE_PARALLEL_HPP
