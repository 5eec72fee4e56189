#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace carpet {

// Execution policy for the data-parallel kernels (k-means restarts, discrepancy
// block enumeration, carpet grid scans). The serial path is the reference
// implementation; the parallel path must produce bit-identical results, which the
// kernels guarantee by reducing per-unit results in a fixed deterministic order.
enum class Exec { Serial, Parallel };

inline int exec_threads(Exec exec) {
#ifdef _OPENMP
    return exec == Exec::Parallel ? omp_get_max_threads() : 1;
#else
    (void)exec;
    return 1;
#endif
}

inline double wall_time() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return 0.0;
#endif
}

} // namespace carpet
