#pragma once
// Execution-mode switch. Every parallel loop in the library maps work items
// into a pre-sized buffer and reduces serially in index order, so Serial and
// OpenMP modes produce bit-identical results; OpenMP only changes wall time.

#include <cstddef>

#ifdef ENTLOC_HAVE_OPENMP
    #include <omp.h>
#endif

namespace entloc {

enum class ExecMode { Serial, OpenMP };

void     set_exec_mode(ExecMode mode);
ExecMode exec_mode();

// thread count: ENTLOC_THREADS env wins, else requested > 0, else OpenMP default
int resolve_threads(int requested);
void set_num_threads(int n); // 0 = auto

template<typename Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef ENTLOC_HAVE_OPENMP
    if(exec_mode() == ExecMode::OpenMP and n > 1) {
    #pragma omp parallel for schedule(static)
        for(long long i = 0; i < static_cast<long long>(n); ++i) body(static_cast<std::size_t>(i));
        return;
    }
#endif
    for(std::size_t i = 0; i < n; ++i) body(i);
}

}
