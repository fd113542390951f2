#include "entloc/states.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace entloc {

namespace {
    void check_unit(double norm2, const char* who) {
        if(std::abs(norm2 - 1.0) > 1e-12) throw std::invalid_argument(std::string(who) + ": coefficients not unit-norm within 1e-12");
    }
}

PureState make_gghz(int n, cplx c0, cplx c1) {
    if(n < 2) throw std::invalid_argument("make_gghz: need at least two qubits");
    check_unit(std::norm(c0) + std::norm(c1), "make_gghz");
    PureState s;
    s.num_qubits = n;
    s.amp.assign(std::size_t{1} << n, cplx{0.0, 0.0});
    s.amp.front() = c0;
    s.amp.back()  = c1;
    return s;
}

PureState make_gw(cplx c1, cplx c2, cplx c3) {
    check_unit(std::norm(c1) + std::norm(c2) + std::norm(c3), "make_gw");
    PureState s;
    s.num_qubits = 3;
    s.amp.assign(8, cplx{0.0, 0.0});
    s.amp[1] = c1; // |001>
    s.amp[2] = c2; // |010>
    s.amp[4] = c3; // |100>
    return s;
}

PureState make_gw_angles(double beta1, double beta2) {
    const double c1 = std::cos(beta2 / 2.0);
    const double s2 = std::sin(beta2 / 2.0);
    return make_gw(c1, s2 * std::cos(beta1 / 2.0), s2 * std::sin(beta1 / 2.0));
}

PureState make_ghz_class(const std::vector<cplx>& coeffs) {
    if(coeffs.size() != 8) throw std::invalid_argument("make_ghz_class: need 8 coefficients");
    double n2 = 0.0;
    for(const auto& c : coeffs) n2 += std::norm(c);
    check_unit(n2, "make_ghz_class");
    return PureState{3, coeffs};
}

PureState make_w_class(const std::vector<cplx>& coeffs) {
    if(coeffs.size() != 4) throw std::invalid_argument("make_w_class: need 4 coefficients");
    check_unit(std::norm(coeffs[0]) + std::norm(coeffs[1]) + std::norm(coeffs[2]) + std::norm(coeffs[3]), "make_w_class");
    PureState s;
    s.num_qubits = 3;
    s.amp.assign(8, cplx{0.0, 0.0});
    s.amp[0] = coeffs[0]; // |000>
    s.amp[4] = coeffs[1]; // |100>
    s.amp[2] = coeffs[2]; // |010>
    s.amp[1] = coeffs[3]; // |001>
    return s;
}

PureState make_dicke(int n, int n1) {
    if(n < 1 or n1 < 0 or n1 > n) throw std::invalid_argument("make_dicke: need 0 <= n1 <= n");
    const std::size_t dim = std::size_t{1} << n;
    std::size_t       count = 0;
    for(std::size_t i = 0; i < dim; ++i)
        if(std::popcount(i) == n1) ++count;
    const double amp = 1.0 / std::sqrt(static_cast<double>(count));
    PureState s;
    s.num_qubits = n;
    s.amp.assign(dim, cplx{0.0, 0.0});
    for(std::size_t i = 0; i < dim; ++i)
        if(std::popcount(i) == n1) s.amp[i] = amp;
    return s;
}

PureState StateFamily::to_state() const {
    switch(tag) {
        case FamilyTag::GGHZ_N: return make_gghz(n, coeffs.at(0), coeffs.at(1));
        case FamilyTag::GW: return make_gw(coeffs.at(0), coeffs.at(1), coeffs.at(2));
        case FamilyTag::GHZ_CLASS: return make_ghz_class(coeffs);
        case FamilyTag::W_CLASS: return make_w_class(coeffs);
        case FamilyTag::DICKE: return make_dicke(n, n1);
    }
    throw std::logic_error("StateFamily::to_state: unknown tag");
}

double HaarSampler::gaussian() {
    // explicit Box-Muller keeps streams identical across standard libraries
    if(have_spare) {
        have_spare = false;
        return spare;
    }
    const double u1 = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53; // (0,1)
    const double u2 = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    const double r  = std::sqrt(-2.0 * std::log(u1));
    spare           = r * std::sin(2.0 * pi * u2);
    have_spare      = true;
    return r * std::cos(2.0 * pi * u2);
}

std::vector<cplx> HaarSampler::unit_sphere(int dim) {
    std::vector<cplx> c(dim);
    double            n2 = 0.0;
    for(auto& ci : c) {
        ci = cplx{gaussian(), gaussian()};
        n2 += std::norm(ci);
    }
    const double scale = 1.0 / std::sqrt(n2);
    for(auto& ci : c) ci *= scale;
    // nudge the squared norm exactly inside the factory tolerance
    double check = 0.0;
    for(const auto& ci : c) check += std::norm(ci);
    const double fix = 1.0 / std::sqrt(check);
    for(auto& ci : c) ci *= fix;
    return c;
}

StateFamily HaarSampler::sample(FamilyTag family) {
    StateFamily f;
    f.tag = family;
    f.n   = 3;
    switch(family) {
        case FamilyTag::GHZ_CLASS: f.coeffs = unit_sphere(8); break;
        case FamilyTag::W_CLASS: f.coeffs = unit_sphere(4); break;
        case FamilyTag::GW: f.coeffs = unit_sphere(3); break;
        default: throw std::invalid_argument("HaarSampler: family is not sampled");
    }
    return f;
}

StateFamily sample_haar(FamilyTag family, std::uint64_t seed) {
    HaarSampler sampler(seed);
    return sampler.sample(family);
}

}
