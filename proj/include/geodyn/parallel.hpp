#pragma once

#include <cstddef>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace geodyn {

// Runs fn(i) for i in [0, n), in parallel with OpenMP when available and
// requested, serially otherwise. The serial path is the reference
// implementation; both must produce identical results (fn must be pure in
// everything except its own output slot). The first worker exception is
// rethrown after the loop.
template <class F>
void for_each_index(std::size_t n, F&& fn, bool parallel = true) {
#ifdef _OPENMP
    if (parallel) {
        std::exception_ptr err;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
        return;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace geodyn
