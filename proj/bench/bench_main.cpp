// Benchmark: the fused Gram kernel (round_objective) against the reference
// path that materializes child branches and averages pair negativity, each in
// Serial and OpenMP mode. Both paths must agree to float noise; the two
// execution modes must agree bit-for-bit.

#include "entloc/entanglement.hpp"
#include "entloc/exec.hpp"
#include "entloc/localize.hpp"
#include "entloc/states.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace {

template<typename F>
double best_ms(F&& f, int reps) {
    double best = 1e300;
    for(int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best          = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

}

int main(int argc, char** argv) {
    using namespace entloc;

    int    n    = 5;
    int    prep = 4; // rounds materialized before the timed round
    int    reps = 5;
    double eta  = 0.8;
    for(int i = 1; i < argc; ++i) {
        const auto want = [&](const char* flag) { return std::strcmp(argv[i], flag) == 0 and i + 1 < argc; };
        if(want("--n")) n = std::atoi(argv[++i]);
        else if(want("--prep")) prep = std::atoi(argv[++i]);
        else if(want("--reps")) reps = std::atoi(argv[++i]);
        else if(want("--eta")) eta = std::atof(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--n N] [--prep R] [--reps K] [--eta x]\n", argv[0]);
            return 2;
        }
    }

    const PureState        ghz = make_gghz(n, cplx(1 / std::sqrt(2.0), 0), cplx(1 / std::sqrt(2.0), 0));
    const std::pair<int, int> pair{0, 1};
    std::vector<int>          assisting;
    for(int q = 2; q < n; ++q) assisting.push_back(q);
    const std::vector<double> etas(assisting.size(), eta);
    const MeasurementMatrix   mm = pattern_oracle(PatternFamily::GGHZ, n, prep + 1);

    set_exec_mode(ExecMode::Serial);
    Ensemble ens = ensemble_from_state(ghz);
    for(int r = 0; r < prep; ++r) ens = measure_round(ens, assisting, etas, mm.column(r), {.target_pair = pair});
    const std::vector<Direction> dirs = mm.column(prep);

    const auto measure = entanglement_functional(MeasureTag::NEGATIVITY);
    const auto reference = [&] {
        const Ensemble children = measure_round(ens, assisting, etas, dirs, {.target_pair = pair});
        return average_entanglement(children, pair, measure);
    };
    const auto kernel = [&] { return round_objective(ens, pair, assisting, etas, dirs).value; };

    const double v_ref = reference();
    const double v_ker = kernel();
    std::printf("GHZ_%d  eta=%.3g  parents=%zu  timed round %d (%zu children)\n", n, eta, ens.branches.size(),
                prep + 1, ens.branches.size() << (2 * assisting.size()));
    std::printf("reference = %.15g\nkernel    = %.15g\n|diff|    = %.3g\n\n", v_ref, v_ker, std::abs(v_ref - v_ker));
    if(std::abs(v_ref - v_ker) > 1e-10) {
        std::fprintf(stderr, "MISMATCH between reference and kernel\n");
        return 1;
    }

    double serial_ker = 0;
    for(const ExecMode mode : {ExecMode::Serial, ExecMode::OpenMP}) {
        set_exec_mode(mode);
        const double ms_ref = best_ms(reference, reps);
        const double ms_ker = best_ms(kernel, reps);
        if(kernel() != v_ker or reference() != v_ref) { // modes must be bit-identical
            std::fprintf(stderr, "MISMATCH across execution modes\n");
            return 1;
        }
        const char* name = mode == ExecMode::Serial ? "serial" : "openmp";
        std::printf("%-6s  reference %9.3f ms   kernel %9.3f ms   kernel speedup %5.2fx\n", name, ms_ref, ms_ker,
                    ms_ref / ms_ker);
        if(mode == ExecMode::Serial) serial_ker = ms_ker;
        else std::printf("        openmp vs serial kernel: %5.2fx\n", serial_ker / ms_ker);
    }
    return 0;
}
