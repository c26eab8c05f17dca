#pragma once

// Thin wrapper so the kernels compile with or without OpenMP.
#ifdef HYDROSTAT_OMP
#include <omp.h>
#define HYDROSTAT_PRAGMA(content) _Pragma(content)
namespace hydrostat {
inline int max_threads() { return omp_get_max_threads(); }
}  // namespace hydrostat
#else
#define HYDROSTAT_PRAGMA(content)
namespace hydrostat {
inline int max_threads() { return 1; }
}  // namespace hydrostat
#endif
