#pragma once

#include <omp.h>

namespace invctl {

/// Worker count for a kernel: explicit request, else the OpenMP default.
inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

} // namespace invctl
