#include "entloc/qcore.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace entloc;

namespace {

// deterministic pseudo-random pure state for property checks
PureState random_state(int n, unsigned seed) {
    std::mt19937                     gen(seed);
    std::normal_distribution<double> nd;
    PureState                        s(n, std::vector<cplx>(std::size_t{1} << n));
    for(auto& a : s.amp) a = cplx(nd(gen), nd(gen));
    return normalize(s);
}

}

TEST_CASE("qubit 0 is the most significant index bit") {
    CHECK(qubit_stride(0, 3) == 4);
    CHECK(qubit_stride(2, 3) == 1);
    CHECK(qubit_bit(4, 0, 3) == 1);
    CHECK(qubit_bit(4, 1, 3) == 0);
    CHECK(qubit_bit(4, 2, 3) == 0);

    const PureState s = basis_state(3, 4); // |100>
    CHECK(s.amp[4] == cplx(1.0, 0.0));
    CHECK(norm_squared(s) == doctest::Approx(1.0));
}

TEST_CASE("apply_single_qubit_op acts on the addressed qubit only") {
    const Mat2 pauli_x{cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)};

    PureState s = basis_state(3, 0);
    s           = apply_single_qubit_op(s, 0, pauli_x);
    CHECK(std::abs(s.amp[4] - cplx(1, 0)) < 1e-15); // |000> -> |100>
    s = apply_single_qubit_op(s, 2, pauli_x);
    CHECK(std::abs(s.amp[5] - cplx(1, 0)) < 1e-15); // -> |101>

    // in-place and out-of-place versions agree on a generic state
    const PureState r   = random_state(4, 11);
    PureState       a   = r;
    const Mat2      op  = {cplx(0.3, 0.1), cplx(-0.2, 0.7), cplx(0.5, 0), cplx(0.4, -0.6)};
    apply_single_qubit_op_inplace(a, 2, op);
    const PureState b = apply_single_qubit_op(r, 2, op);
    for(std::size_t i = 0; i < a.amp.size(); ++i) CHECK(std::abs(a.amp[i] - b.amp[i]) < 1e-14);
}

TEST_CASE("inner_product and normalize") {
    const PureState a = random_state(3, 1);
    const PureState b = random_state(3, 2);
    CHECK(std::abs(inner_product(a, a) - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-12);

    PureState small(1, {cplx(1e-3, 0), cplx(0, 0)});
    CHECK_THROWS_AS(normalize(PureState(1, {cplx(0, 0), cplx(0, 0)})), std::runtime_error);
    CHECK_THROWS_AS(normalize(PureState(1, {cplx(1e-9, 0), cplx(0, 0)})), std::runtime_error); // below eps_prob
    CHECK(norm_squared(normalize(small)) == doctest::Approx(1.0));
}

TEST_CASE("reduced_density of a Bell pair embedded in 3 qubits") {
    // (|000> + |110>)/sqrt2: qubits 0,1 in a Bell state, qubit 2 factored out
    PureState s(3, std::vector<cplx>(8));
    s.amp[0] = s.amp[6] = cplx(1 / std::sqrt(2.0), 0);

    const Density2Q dm = reduced_density(s, 0, 1);
    CHECK(dm[0].real() == doctest::Approx(0.5));  // <00|rho|00>
    CHECK(dm[3].real() == doctest::Approx(0.5));  // <00|rho|11>
    CHECK(dm[15].real() == doctest::Approx(0.5)); // <11|rho|11>
    CHECK(std::abs(dm[5]) < 1e-15);               // no |01> population

    // trace one and Hermitian
    cplx tr = dm[0] + dm[5] + dm[10] + dm[15];
    CHECK(std::abs(tr - cplx(1, 0)) < 1e-12);
    for(int i = 0; i < 4; ++i)
        for(int j = 0; j < 4; ++j) CHECK(std::abs(dm[4 * i + j] - std::conj(dm[4 * j + i])) < 1e-12);

    // swapped qubit order transposes the pair factors: q2 (x) q1 basis
    const Density2Q sw = reduced_density(s, 1, 0);
    CHECK(sw[3].real() == doctest::Approx(0.5));
}

TEST_CASE("partial_transpose is an involution and detects entanglement") {
    const PureState bell = random_state(2, 5);
    const Density2Q dm   = reduced_density(bell, 0, 1);
    const Mat4      pt   = partial_transpose(dm);
    const Mat4      ptpt = partial_transpose(pt);
    for(int i = 0; i < 16; ++i) CHECK(std::abs(ptpt[i] - dm[i]) < 1e-15);

    // PT of a pure product state stays positive
    PureState prod(2, {cplx(0.6, 0), cplx(0.8, 0), cplx(0, 0), cplx(0, 0)});
    const auto ev = hermitian_eigenvalues(partial_transpose(reduced_density(prod, 0, 1)));
    CHECK(ev[0] > -1e-12);
}

TEST_CASE("hermitian eigensolvers") {
    // diag(4,1,3,2) plus an off-diagonal coupling with known spectrum
    Mat4 m{};
    m[0]  = cplx(4, 0);
    m[5]  = cplx(1, 0);
    m[10] = cplx(3, 0);
    m[15] = cplx(2, 0);
    m[1]  = cplx(0, 1); // couples (0,1): eigenvalues (5 +- sqrt(13))/2
    m[4]  = cplx(0, -1);

    const auto   ev = hermitian_eigenvalues(m);
    const double lo = (5 - std::sqrt(13.0)) / 2, hi = (5 + std::sqrt(13.0)) / 2;
    CHECK(ev[0] == doctest::Approx(lo));
    CHECK(ev[1] == doctest::Approx(2.0));
    CHECK(ev[2] == doctest::Approx(3.0));
    CHECK(ev[3] == doctest::Approx(hi));

    // unchecked and jacobi4 variants agree (jacobi4 is unsorted)
    const auto ev2 = hermitian_eigenvalues_unchecked(m);
    auto       ev3 = jacobi4_eigenvalues(m);
    std::sort(ev3.begin(), ev3.end());
    for(int i = 0; i < 4; ++i) {
        CHECK(ev[i] == doctest::Approx(ev2[i]));
        CHECK(ev[i] == doctest::Approx(ev3[i]));
    }

    Mat4 nonherm = m;
    nonherm[4]   = cplx(0.5, 0);
    CHECK_THROWS_AS(hermitian_eigenvalues(nonherm), std::invalid_argument);

    // n=3 general solver with eigenvectors: verify A v = lambda v
    std::vector<cplx> a = {cplx(2, 0),  cplx(0, 1),  cplx(0.3, 0), //
                           cplx(0, -1), cplx(1, 0),  cplx(0, 0),   //
                           cplx(0.3, 0), cplx(0, 0), cplx(0.5, 0)};
    std::vector<cplx> vecs;
    const auto        evs = hermitian_eigs(a, 3, &vecs);
    CHECK(evs.size() == 3);
    CHECK(evs[0] <= evs[1]);
    CHECK(evs[1] <= evs[2]);
    for(int k = 0; k < 3; ++k) {
        for(int i = 0; i < 3; ++i) {
            cplx av(0, 0);
            for(int j = 0; j < 3; ++j) av += a[3 * i + j] * vecs[3 * j + k];
            CHECK(std::abs(av - evs[k] * vecs[3 * i + k]) < 1e-9);
        }
    }
}

TEST_CASE("schmidt_spectrum") {
    // GHZ across any cut: {1/2, 1/2}
    PureState ghz(3, std::vector<cplx>(8));
    ghz.amp[0] = ghz.amp[7] = cplx(1 / std::sqrt(2.0), 0);
    for(const auto& cut : {Bipartition{{0}}, Bipartition{{1}}, Bipartition{{0, 2}}}) {
        const auto spec = schmidt_spectrum(ghz, cut);
        double     sum = 0, mx = 0;
        for(double v : spec) {
            sum += v;
            mx = std::max(mx, v);
        }
        CHECK(sum == doctest::Approx(1.0));
        CHECK(mx == doctest::Approx(0.5));
    }

    // product state: rank one on the single-qubit cut
    const auto spec = schmidt_spectrum(basis_state(3, 5), Bipartition{{1}});
    CHECK(*std::max_element(spec.begin(), spec.end()) == doctest::Approx(1.0));

    CHECK_THROWS_AS(schmidt_spectrum(ghz, Bipartition{{}}), std::invalid_argument);
    CHECK_THROWS_AS(schmidt_spectrum(ghz, Bipartition{{0, 1, 2}}), std::invalid_argument);
}
