#pragma once
// Factories for the state families under study plus seeded Haar-uniform
// sampling inside a family. Qubit 0 is the most significant index bit, so
// e.g. the W-class coefficient on |100> lands at amplitude index 4.

#include "entloc/qcore.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace entloc {

enum class FamilyTag { GGHZ_N, GW, GHZ_CLASS, W_CLASS, DICKE };

struct StateFamily {
    FamilyTag         tag = FamilyTag::GGHZ_N;
    std::vector<cplx> coeffs;
    int               n = 3, n1 = 0; // register size; n1 used by Dicke only

    PureState to_state() const;
};

PureState make_gghz(int n, cplx c0, cplx c1);

// c1|001> + c2|010> + c3|100>
PureState make_gw(cplx c1, cplx c2, cplx c3);
// c1 = cos(b2/2), c2 = sin(b2/2) cos(b1/2), c3 = sin(b2/2) sin(b1/2)
PureState make_gw_angles(double beta1, double beta2);

// eight amplitudes in computational-basis order
PureState make_ghz_class(const std::vector<cplx>& coeffs);
// c0|000> + c1|100> + c2|010> + c3|001>
PureState make_w_class(const std::vector<cplx>& coeffs);

PureState make_dicke(int n, int n1);

// Haar-uniform coefficients inside a family; deterministic under a fixed seed.
// Each sampler owns its generator; use one instance per thread.
class HaarSampler {
    public:
    explicit HaarSampler(std::uint64_t seed) : gen(seed) {}

    StateFamily sample(FamilyTag family); // GHZ_CLASS, W_CLASS or GW
    double      gaussian();               // standard normal (Box-Muller)

    private:
    std::mt19937_64 gen;
    bool            have_spare = false;
    double          spare      = 0.0;

    std::vector<cplx> unit_sphere(int dim);
};

StateFamily sample_haar(FamilyTag family, std::uint64_t seed);

}
