#include "sylkrylov/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace sylkrylov {

namespace {
std::atomic<bool> g_enabled{false};
std::atomic<unsigned> g_threads{1};
}  // namespace

void set_parallel_kernels(bool enabled, unsigned threads) {
    g_enabled.store(enabled);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    g_threads.store(enabled ? threads : 1);
}

bool parallel_kernels_enabled() { return g_enabled.load(); }
unsigned parallel_kernel_threads() { return g_threads.load(); }

namespace detail {

void parallel_for_ranges(std::ptrdiff_t n, void (*fn)(std::ptrdiff_t, std::ptrdiff_t, void*), void* ctx) {
    const unsigned threads = g_enabled.load() ? g_threads.load() : 1;
    if (threads <= 1 || n < 256) {
        fn(0, n, ctx);
        return;
    }
    const std::ptrdiff_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(t) * chunk;
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(lo + chunk, n);
        if (lo >= hi) break;
        pool.emplace_back([=] { fn(lo, hi, ctx); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

}  // namespace sylkrylov
