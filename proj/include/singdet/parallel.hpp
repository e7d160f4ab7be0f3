#pragma once

#include <cstddef>
#include <utility>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace singdet {

// Execution policy for the batch kernels (eigenvalue scans, trace sampling,
// quadrature batches).  Serial is the reference implementation; OpenMP must
// produce identical results since every slot is written independently.
enum class Exec { Serial, OpenMP };

inline int hardware_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// body(i) for i in [0, n); results must be stored by index.
template <class F>
void parallel_for(Exec exec, std::size_t n, F&& body) {
#if defined(_OPENMP)
    if (exec == Exec::OpenMP) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace singdet
