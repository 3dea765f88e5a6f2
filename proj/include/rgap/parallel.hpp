#pragma once

#include <cstddef>

namespace rgap {

// Data-parallel loops over independent items. Every call site writes results
// into disjoint, preallocated slots, so the OpenMP path produces bit-identical
// output to the serial reference regardless of thread count or schedule.
// The serial path is kept as the reference implementation for tests and as
// the fallback when OpenMP is unavailable.
enum class ParallelMode { Serial, OpenMP };

ParallelMode default_parallel_mode();
void set_default_parallel_mode(ParallelMode mode);

int parallel_worker_count();

template <typename Fn>
void parallel_for(std::size_t n, ParallelMode mode, Fn&& fn);

namespace detail {
bool openmp_enabled();
}

template <typename Fn>
void parallel_for(std::size_t n, ParallelMode mode, Fn&& fn) {
    if (mode == ParallelMode::OpenMP && detail::openmp_enabled()) {
#if defined(RGAP_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    parallel_for(n, default_parallel_mode(), fn);
}

}  // namespace rgap
