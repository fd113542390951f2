#include "entloc/entanglement.hpp"

#include "entloc/states.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace entloc;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

Density2Q pure_pair(const std::vector<cplx>& amps) {
    PureState s(2, amps);
    s = normalize(s);
    return reduced_density(s, 0, 1);
}

// fully entangled fraction oracle: the largest overlap with any maximally
// entangled state equals the top eigenvalue of Re(rho) expressed in the magic
// basis {|phi+>, i|phi->, i|psi+>, |psi->}
double fef_oracle(const Density2Q& dm) {
    const cplx i{0, 1};
    const std::array<std::array<cplx, 4>, 4> magic{{
        {inv_sqrt2, 0, 0, inv_sqrt2},          // |phi+>
        {i * inv_sqrt2, 0, 0, -i * inv_sqrt2}, // i|phi->
        {0, i * inv_sqrt2, i * inv_sqrt2, 0},  // i|psi+>
        {0, inv_sqrt2, -inv_sqrt2, 0},         // |psi->
    }};
    Mat4 re{};
    for(int a = 0; a < 4; ++a)
        for(int b = 0; b < 4; ++b) {
            cplx v{0, 0};
            for(int r = 0; r < 4; ++r)
                for(int c = 0; c < 4; ++c) v += std::conj(magic[a][r]) * dm[4 * r + c] * magic[b][c];
            re[4 * a + b] = v;
        }
    // in the magic basis the max over real superpositions is the top
    // eigenvalue of the real symmetric part
    Mat4 sym{};
    for(int a = 0; a < 4; ++a)
        for(int b = 0; b < 4; ++b) sym[4 * a + b] = (re[4 * a + b].real() + re[4 * b + a].real()) / 2.0;
    const auto ev = hermitian_eigenvalues(sym);
    return ev[3];
}

Density2Q random_mixed(unsigned seed, int terms) {
    std::mt19937                     gen(seed);
    std::normal_distribution<double> nd;
    std::vector<double>              w(terms);
    double                           wsum = 0;
    for(auto& x : w) {
        x = std::abs(nd(gen)) + 0.05;
        wsum += x;
    }
    Density2Q dm{};
    for(int t = 0; t < terms; ++t) {
        std::vector<cplx> amps(4);
        for(auto& a : amps) a = cplx(nd(gen), nd(gen));
        const Density2Q part = pure_pair(amps);
        for(int k = 0; k < 16; ++k) dm[k] += (w[t] / wsum) * part[k];
    }
    return dm;
}

}

TEST_CASE("negativity of the standard states") {
    // Bell pair: 1/2; product: 0
    CHECK(negativity(pure_pair({inv_sqrt2, 0, 0, inv_sqrt2})) == doctest::Approx(0.5));
    CHECK(negativity(pure_pair({cplx(0.6, 0), cplx(0.8, 0), 0, 0})) == doctest::Approx(0.0));

    // pure state cos a |00> + sin a |11>: negativity = |cos a sin a|
    const double a = 0.3;
    CHECK(negativity(pure_pair({std::cos(a), 0, 0, std::sin(a)})) == doctest::Approx(std::cos(a) * std::sin(a)));

    // Werner state p|phi+><phi+| + (1-p) I/4: negativity max(0, (3p-1)/4)
    for(const double p : {0.2, 0.6, 0.95}) {
        Density2Q dm = pure_pair({inv_sqrt2, 0, 0, inv_sqrt2});
        for(int k = 0; k < 16; ++k) dm[k] *= p;
        for(int d = 0; d < 4; ++d) dm[5 * d] += (1 - p) / 4.0;
        CHECK(negativity(dm) == doctest::Approx(std::max(0.0, (3 * p - 1) / 4.0)));
    }
}

TEST_CASE("negativity is invariant under local unitaries") {
    std::mt19937                           gen(77);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    const Density2Q                        dm = random_mixed(3, 2);
    const double                           n0 = negativity(dm);

    for(int trial = 0; trial < 5; ++trial) {
        // random U(2) (x) U(2) rotation applied as a 4x4 conjugation
        const auto u2 = [&] {
            const double a = ang(gen), b = ang(gen), c = ang(gen);
            Mat2 u;
            u[0] = std::polar(std::cos(a), b);
            u[1] = std::polar(std::sin(a), c);
            u[2] = -std::polar(std::sin(a), -c);
            u[3] = std::polar(std::cos(a), -b);
            return u;
        };
        const Mat2 u = u2(), v = u2();
        Mat4       big{};
        for(int i = 0; i < 4; ++i)
            for(int j = 0; j < 4; ++j) big[4 * i + j] = u[2 * (i >> 1) + (j >> 1)] * v[2 * (i & 1) + (j & 1)];
        Mat4 tmp{}, rotated{};
        for(int i = 0; i < 4; ++i)
            for(int j = 0; j < 4; ++j)
                for(int k = 0; k < 4; ++k) tmp[4 * i + j] += big[4 * i + k] * dm[4 * k + j];
        for(int i = 0; i < 4; ++i)
            for(int j = 0; j < 4; ++j)
                for(int k = 0; k < 4; ++k) rotated[4 * i + j] += tmp[4 * i + k] * std::conj(big[4 * j + k]);
        CHECK(negativity(rotated) == doctest::Approx(n0).epsilon(1e-9));
    }
}

TEST_CASE("ggm of the named families") {
    CHECK(ggm(make_gghz(3, inv_sqrt2, inv_sqrt2)) == doctest::Approx(0.5));
    CHECK(ggm(make_gghz(4, cplx(0.6, 0), cplx(0.8, 0))) == doctest::Approx(0.36)); // min(c0^2, c1^2)
    CHECK(ggm(basis_state(3, 5)) == doctest::Approx(0.0));
    CHECK(ggm(make_dicke(3, 1)) == doctest::Approx(1.0 / 3.0));

    // gW with c1 = sqrt(1-2G), c2 = c3 = sqrt(G) has GGM = G up to 1/3
    for(const double g : {0.1, 0.25, 1.0 / 3.0}) {
        const PureState s = make_gw(std::sqrt(1 - 2 * g), std::sqrt(g), std::sqrt(g));
        CHECK(ggm(s) == doctest::Approx(g).epsilon(1e-9));
    }
}

TEST_CASE("reduced W pair negativity is (sqrt5 - 1)/6") {
    const Density2Q dm = reduced_density(make_dicke(3, 1), 0, 1);
    CHECK(negativity(dm) == doctest::Approx((std::sqrt(5.0) - 1.0) / 6.0));
}

TEST_CASE("bell_fidelity equals the fully entangled fraction") {
    // exact anchors first
    CHECK(bell_fidelity(pure_pair({inv_sqrt2, 0, 0, inv_sqrt2})) == doctest::Approx(1.0));
    CHECK(bell_fidelity(pure_pair({0, inv_sqrt2, -inv_sqrt2, 0})) == doctest::Approx(1.0));
    CHECK(bell_fidelity(pure_pair({1, 0, 0, 0})) == doctest::Approx(0.5));

    // pure cos a|00> + sin a|11>: FEF = (cos a + sin a)^2 / 2
    const double a = 0.4;
    CHECK(bell_fidelity(pure_pair({std::cos(a), 0, 0, std::sin(a)})) ==
          doctest::Approx(0.5 * (std::cos(a) + std::sin(a)) * (std::cos(a) + std::sin(a))));

    for(unsigned seed = 1; seed <= 6; ++seed) {
        const Density2Q dm = random_mixed(seed, seed % 3 + 1);
        CHECK(bell_fidelity(dm) == doctest::Approx(fef_oracle(dm)).epsilon(5e-7));
    }

    // repeated calls are deterministic bit-for-bit
    const Density2Q dm = random_mixed(9, 2);
    CHECK(bell_fidelity(dm) == bell_fidelity(dm));
}

TEST_CASE("entanglement_functional dispatch") {
    const Density2Q bell = pure_pair({inv_sqrt2, 0, 0, inv_sqrt2});
    CHECK(entanglement_functional(MeasureTag::NEGATIVITY)(bell) == doctest::Approx(0.5));
    CHECK(entanglement_functional(MeasureTag::BELL_FIDELITY)(bell) == doctest::Approx(1.0));
    CHECK(entanglement_functional(MeasureTag::GGM)(bell) == doctest::Approx(0.5));
}
