#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stepdiff {

/// Resolves a requested worker count; <= 0 means "library default".
inline int effective_workers(int requested) {
#ifdef _OPENMP
    return requested > 0 ? requested : omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

/// OpenMP loop over [0, count) with `workers` threads. The body writes only
/// to per-index slots, so results never depend on the schedule. The first
/// exception thrown by any iteration is rethrown after the loop; callers must
/// discard partial output in that case.
template <typename Body>
void parallel_for_index(std::size_t count, int workers, Body&& body) {
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    const int threads = effective_workers(workers);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    }
    (void)threads;
    if (first_error) std::rethrow_exception(first_error);
}

/// Reference loop kept for testing the parallel kernels against.
template <typename Body>
void serial_for_index(std::size_t count, Body&& body) {
    for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace stepdiff
