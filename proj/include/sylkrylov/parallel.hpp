#pragma once

#include <cstddef>

namespace sylkrylov {

/// Opt-in kernel parallelism. Off by default: all kernels run serially and
/// bitwise deterministically. Enabling splits independent work (spmm rows,
/// dense columns) across `threads` std::threads and relaxes the bitwise
/// determinism guarantee.
void set_parallel_kernels(bool enabled, unsigned threads = 0);

bool parallel_kernels_enabled();
unsigned parallel_kernel_threads();

namespace detail {
/// Runs fn(begin, end) over [0, n) either serially or split across the
/// configured thread count.
void parallel_for_ranges(std::ptrdiff_t n, void (*fn)(std::ptrdiff_t, std::ptrdiff_t, void*), void* ctx);
}  // namespace detail

}  // namespace sylkrylov
