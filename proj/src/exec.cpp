#include "entloc/exec.hpp"

#include <cstdlib>
#include <string>

namespace entloc {

namespace {
    ExecMode g_mode =
#ifdef ENTLOC_HAVE_OPENMP
        ExecMode::OpenMP;
#else
        ExecMode::Serial;
#endif
}

void     set_exec_mode(ExecMode mode) { g_mode = mode; }
ExecMode exec_mode() {
#ifdef ENTLOC_HAVE_OPENMP
    return g_mode;
#else
    return ExecMode::Serial;
#endif
}

int resolve_threads(int requested) {
    // the environment variable outranks the --threads flag
    if(const char* env = std::getenv("ENTLOC_THREADS")) {
        int n = std::atoi(env);
        if(n > 0) return n;
    }
    if(requested > 0) return requested;
#ifdef ENTLOC_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_num_threads(int n) {
#ifdef ENTLOC_HAVE_OPENMP
    omp_set_num_threads(resolve_threads(n));
#else
    (void) n;
#endif
}

}
