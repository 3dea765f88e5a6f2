#include "rgap/parallel.hpp"

#include <atomic>
#include <cstdlib>

#if defined(RGAP_HAVE_OPENMP)
#include <omp.h>
#endif

namespace rgap {

namespace {

std::atomic<ParallelMode> g_mode{
#if defined(RGAP_HAVE_OPENMP)
    ParallelMode::OpenMP
#else
    ParallelMode::Serial
#endif
};

bool serial_forced_by_env() {
    const char* v = std::getenv("RGAP_SERIAL");
    return v != nullptr && v[0] != '\0' && v[0] != '0';
}

}  // namespace

ParallelMode default_parallel_mode() {
    if (serial_forced_by_env()) return ParallelMode::Serial;
    return g_mode.load();
}

void set_default_parallel_mode(ParallelMode mode) { g_mode.store(mode); }

int parallel_worker_count() {
#if defined(RGAP_HAVE_OPENMP)
    if (default_parallel_mode() == ParallelMode::OpenMP) return omp_get_max_threads();
#endif
    return 1;
}

namespace detail {
bool openmp_enabled() {
#if defined(RGAP_HAVE_OPENMP)
    return !serial_forced_by_env();
#else
    return false;
#endif
}
}  // namespace detail

}  // namespace rgap
