#include "entloc/localize.hpp"

#include "entloc/entanglement.hpp"
#include "entloc/exec.hpp"
#include "entloc/states.hpp"

#include <doctest.h>

#include <cmath>

using namespace entloc;

namespace {

const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
const std::pair<int, int> pair01{0, 1};

// reference for the fused kernel: materialize the children, then average the
// pair negativity branch by branch
double reference_objective(const Ensemble& ens, const std::vector<int>& assisting,
                           const std::vector<double>& etas, const std::vector<Direction>& dirs) {
    MeasureOpts opts;
    opts.target_pair   = pair01;
    const Ensemble out = measure_round(ens, assisting, etas, dirs, opts);
    return average_entanglement(out, pair01, entanglement_functional(MeasureTag::NEGATIVITY));
}

PureState embedded_random4(std::uint64_t seed) {
    const PureState s = sample_haar(FamilyTag::GHZ_CLASS, seed).to_state();
    PureState       s4(4, std::vector<cplx>(16));
    for(int i = 0; i < 8; ++i) s4.amp[2 * i] = s.amp[i];
    s4.amp[9]  = cplx(0.4, -0.2); // populate qubit 3
    s4.amp[14] = cplx(-0.1, 0.5);
    return normalize(s4);
}

}

TEST_CASE("round_objective matches the materialized reference") {
    const std::vector<Direction> generic{{1.1, 0.6}};
    for(const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Ensemble ens = ensemble_from_state(sample_haar(FamilyTag::GHZ_CLASS, seed).to_state());
        for(const auto& dirs : {std::vector<Direction>{dir_x}, std::vector<Direction>{dir_z}, generic}) {
            for(const double eta : {0.4, 0.8, 1.0}) {
                const RoundEval ev = round_objective(ens, pair01, {2}, {eta}, dirs);
                CHECK(ev.value == doctest::Approx(reference_objective(ens, {2}, {eta}, dirs)).epsilon(1e-12));
            }
        }
        // deepen the tree and compare again on a two-qubit assisting set
        ens = measure_round(ens, {2}, {0.8}, {dir_x}, {.target_pair = pair01});
        const RoundEval ev = round_objective(ens, pair01, {2}, {0.9}, {dir_y});
        CHECK(ev.value == doctest::Approx(reference_objective(ens, {2}, {0.9}, {dir_y})).epsilon(1e-12));
        CHECK(ev.kept == 4);
    }

    Ensemble ens4 = ensemble_from_state(embedded_random4(17));
    const std::vector<double>    etas{0.7, 0.9};
    const std::vector<Direction> dirs{{0.3, 5.1}, {2.0, 1.2}};
    CHECK(round_objective(ens4, pair01, {2, 3}, etas, dirs).value ==
          doctest::Approx(reference_objective(ens4, {2, 3}, etas, dirs)).epsilon(1e-12));
}

TEST_CASE("round_objective prune accounting") {
    const Ensemble  ens = ensemble_from_state(make_gghz(3, inv_sqrt2, inv_sqrt2));
    const RoundEval all = round_objective(ens, pair01, {2}, {1.0}, {dir_z}, 0.6);
    CHECK(all.kept == 0); // both 0.5-mass children fall below the threshold
    CHECK(all.pruned == doctest::Approx(1.0));
    CHECK(all.value == doctest::Approx(0.0));

    const RoundEval kept = round_objective(ens, pair01, {2}, {1.0}, {dir_z});
    CHECK(kept.kept == 2);
    CHECK(kept.pruned == doctest::Approx(0.0));
}

TEST_CASE("round_objective geometry guards") {
    const Ensemble ens = ensemble_from_state(make_gghz(3, inv_sqrt2, inv_sqrt2));
    CHECK_THROWS_AS(round_objective(ens, {0, 0}, {2}, {0.8}, {dir_x}), std::invalid_argument);
    CHECK_THROWS_AS(round_objective(ens, pair01, {}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(round_objective(ens, pair01, {1}, {0.8}, {dir_x}), std::invalid_argument);
    CHECK_THROWS_AS(round_objective(ens, pair01, {2}, {0.8, 0.8}, {dir_x, dir_x}), std::invalid_argument);
}

TEST_CASE("single-round LE factorizes for gGHZ: eta^(N-2) |c0 c1|") {
    for(const double eta : {0.5, 1.0}) {
        for(const double c0 : {0.3, inv_sqrt2, 0.9}) {
            const double c1 = std::sqrt(1 - c0 * c0);
            const auto   r3 = single_round_le(make_gghz(3, c0, c1), pair01, {2}, {eta});
            CHECK(r3.value == doctest::Approx(eta * c0 * c1).epsilon(1e-6));
        }
    }
    // two assisting qubits contribute one eta factor each
    const auto r4 = single_round_le(make_gghz(4, cplx(0.6, 0), cplx(0.8, 0)), pair01, {2, 3}, {0.8, 0.8});
    CHECK(r4.value == doctest::Approx(0.64 * 0.48).epsilon(1e-6));
}

TEST_CASE("W state round 1: z beats the equator") {
    const PureState w = make_dicke(3, 1);
    const auto      full  = single_round_le(w, pair01, {2}, {0.8});
    const auto      pauli = single_round_le(w, pair01, {2}, {0.8}, {SpaceKind::PAULI, std::nullopt});
    CHECK(full.value == doctest::Approx(0.2874550139).epsilon(1e-8));
    CHECK(pauli.value == doctest::Approx(full.value).epsilon(1e-9));
    CHECK(same_direction(full.dirs[0], dir_z, 1e-6));

    // the best equatorial direction is strictly worse
    const RoundEval x = round_objective(ensemble_from_state(w), pair01, {2}, {0.8}, {dir_x});
    CHECK(x.value == doctest::Approx(0.2855623894).epsilon(1e-8));
}

TEST_CASE("sequential LE on GHZ3: known two-round value, monotone rounds") {
    const PureState ghz = make_gghz(3, inv_sqrt2, inv_sqrt2);
    const SleResult res = sequential_le(ghz, pair01, {2}, constant_um(1, 6, 0.8), 6);
    REQUIRE(res.rounds.size() == 6);

    CHECK(res.rounds[0].sle_value == doctest::Approx(0.4).epsilon(1e-9));
    const double e2 = 0.8 * std::sqrt(2 - 0.64) / 2; // eta sqrt(2-eta^2) |c0 c1|
    CHECK(res.rounds[1].sle_value == doctest::Approx(e2).epsilon(1e-6));

    for(int r = 1; r < 6; ++r) {
        CHECK(res.rounds[r].sle_value >= res.rounds[r - 1].sle_value - 1e-9);
        CHECK(res.rounds[r].round == r + 1);
        CHECK(res.rounds[r].ensemble_size == std::size_t{1} << (r + 1));
        CHECK(res.rounds[r].pruned_mass == doctest::Approx(0.0));
    }
    CHECK(res.final_value() > 0.4979); // at least the fixed alternating pattern
    CHECK(res.final_value() < 0.5);    // never above the projective optimum
    CHECK(not res.final_ensemble.has_value());

    // round-2 optimum is orthogonal to round-1 (x then y here)
    CHECK(same_direction(res.rounds[0].optimal_dirs[0], dir_x, 1e-6));
    CHECK(same_direction(res.rounds[1].optimal_dirs[0], dir_y, 1e-6));
}

TEST_CASE("sequential LE bookkeeping with dedup and kept ensemble") {
    const PureState ghz = make_gghz(3, inv_sqrt2, inv_sqrt2);
    SleOpts         opts;
    opts.dedup               = true;
    opts.keep_final_ensemble = true;
    // force the alternating pattern: sharp measurements cycle through a small
    // set of pair phases, so branches recur and dedup can bite
    const SearchSpace space{SpaceKind::FIXED_PATTERN, pattern_oracle(PatternFamily::GGHZ, 3, 4)};
    const SleResult   res = sequential_le(ghz, pair01, {2}, constant_um(1, 4, 1.0), 4, space, opts);
    REQUIRE(res.final_ensemble.has_value());
    CHECK(res.rounds.back().dedup_size < std::size_t{16});
    CHECK(res.final_ensemble->branches.size() == res.rounds.back().dedup_size);
    CHECK(res.final_value() == doctest::Approx(0.5).epsilon(1e-9)); // sharp PV reaches |c0 c1|

    // the same protocol at eta<1 creates genuinely distinct branches
    const SleResult soft = sequential_le(ghz, pair01, {2}, constant_um(1, 4, 0.8), 4, space, opts);
    CHECK(soft.rounds.back().dedup_size == soft.rounds.back().ensemble_size);
    CHECK(soft.rounds.back().ensemble_size == 16);
}

TEST_CASE("OPS enumeration: counts, orthogonality, known members") {
    CHECK(OpsEnumerator(1, 1).count() == 3);
    CHECK(OpsEnumerator(1, 2).count() == 6);
    CHECK(OpsEnumerator(1, 3).count() == 12);
    CHECK(OpsEnumerator(2, 2).count() == 36);

    const auto mats = ops_enumerate(1, 4);
    CHECK(mats.size() == 24);
    int hit_zxyz = 0, hit_zxzx = 0;
    for(const auto& mm : mats) {
        for(int r = 1; r < 4; ++r) { // consecutive rounds differ and are both Pauli axes
            CHECK_FALSE(same_direction(mm.at(0, r), mm.at(0, r - 1)));
        }
        const auto is = [&](int r, const Direction& d) { return same_direction(mm.at(0, r), d); };
        if(is(0, dir_z) and is(1, dir_x) and is(2, dir_y) and is(3, dir_z)) ++hit_zxyz;
        if(is(0, dir_z) and is(1, dir_x) and is(2, dir_z) and is(3, dir_x)) ++hit_zxzx;
    }
    CHECK(hit_zxyz == 1);
    CHECK(hit_zxzx == 1);

    CHECK_THROWS_AS(ops_enumerate(2, 11), std::length_error); // 3072^2 matrices is over budget
}

TEST_CASE("OPS-restricted SLE reaches the full-sphere value on GHZ3") {
    const PureState ghz  = make_gghz(3, inv_sqrt2, inv_sqrt2);
    const SleResult full = sequential_le(ghz, pair01, {2}, constant_um(1, 3, 0.8), 3);
    const SleResult ops  = sequential_le(ghz, pair01, {2}, constant_um(1, 3, 0.8), 3, {SpaceKind::OPS, std::nullopt});
    CHECK(ops.final_value() == doctest::Approx(full.final_value()).epsilon(1e-9));
}

TEST_CASE("global LE") {
    const PureState ghz = make_gghz(3, inv_sqrt2, inv_sqrt2);
    const GleResult res = global_le(ghz, pair01, {2}, constant_um(1, 2, 0.8), 2);
    CHECK(res.value == doctest::Approx(0.8 * std::sqrt(2 - 0.64) / 2).epsilon(1e-5));
    CHECK(res.mm.nb == 1);
    CHECK(res.mm.rounds == 2);

    // never below the greedy value it was seeded with
    const PureState w   = make_dicke(3, 1);
    const SleResult sle = sequential_le(w, pair01, {2}, constant_um(1, 2, 0.8), 2);
    const GleResult gle = global_le(w, pair01, {2}, constant_um(1, 2, 0.8), 2);
    CHECK(gle.value >= sle.final_value() - 1e-9);

    CHECK_THROWS_AS(global_le(ghz, pair01, {2}, constant_um(1, 5, 0.8), 5), std::invalid_argument);
}

TEST_CASE("delta series: closed forms for gGHZ, monotone for gW") {
    const std::vector<cplx> coeffs{cplx(0.6, 0), cplx(0.8, 0)};
    const auto              d = delta_series(DeltaFamily::GGHZ, coeffs, 0.7, 3);
    REQUIRE(d.size() == 3);
    CHECK(d[0].delta == doctest::Approx(0.3).epsilon(1e-6));                                // 1 - eta
    CHECK(d[1].delta == doctest::Approx(1 - 0.7 * std::sqrt(2 - 0.49)).epsilon(1e-6));      // 1 - eta sqrt(2-eta^2)
    CHECK(d[2].delta <= d[1].delta + 1e-6);

    for(const std::uint64_t seed : {11ull, 12ull}) {
        const auto gw = sample_haar(FamilyTag::GW, seed);
        const auto dg = delta_series(DeltaFamily::GW, gw.coeffs, 0.8, 3);
        for(std::size_t r = 1; r < dg.size(); ++r) CHECK(dg[r].delta <= dg[r - 1].delta + 1e-6);
    }

    // a vanishing projective value leaves the ratio undefined
    CHECK_THROWS_AS(delta_series(DeltaFamily::GGHZ, {cplx(1, 0), cplx(0, 0)}, 0.8, 2), std::domain_error);
    CHECK_THROWS_AS(delta_series(DeltaFamily::GGHZ, coeffs, 0.0, 2), std::invalid_argument);
}

TEST_CASE("rounds_to_threshold") {
    const PureState ghz = make_gghz(3, inv_sqrt2, inv_sqrt2);
    // greedy round 5 already lands within 5e-3 of the projective 0.5, one
    // round ahead of the strict alternating pattern and the "at most six" bound
    const int r_ghz = rounds_to_threshold(ghz, pair01, {2}, 0.8, 5e-3, 8);
    CHECK(r_ghz == 5);
    CHECK(r_ghz <= 6);
    CHECK(rounds_to_threshold(make_dicke(3, 1), pair01, {2}, 0.8, 5e-3, 8) == 4);
    CHECK(rounds_to_threshold(ghz, pair01, {2}, 0.8, 5e-3, 2) == rounds_not_reached);
}

TEST_CASE("pattern oracles") {
    const MeasurementMatrix g4 = pattern_oracle(PatternFamily::GGHZ, 4, 3);
    CHECK(g4.nb == 2);
    CHECK(g4.rounds == 3);
    CHECK(same_direction(g4.at(0, 0), dir_x)); // even row: x y x ...
    CHECK(same_direction(g4.at(0, 1), dir_y));
    CHECK(same_direction(g4.at(0, 2), dir_x));
    CHECK(same_direction(g4.at(1, 0), dir_y)); // odd row: y x y ...
    CHECK(same_direction(g4.at(1, 1), dir_x));

    // central Dicke states use z x alternation on every row
    const MeasurementMatrix d42 = pattern_oracle(PatternFamily::DICKE, 4, 4, 2);
    for(int b = 0; b < 2; ++b)
        for(int r = 0; r < 4; ++r) CHECK(same_direction(d42.at(b, r), r % 2 ? dir_x : dir_z));

    // off-center Dicke states cycle three axes, phase-shifted by row parity
    const MeasurementMatrix d41 = pattern_oracle(PatternFamily::DICKE, 4, 6, 1);
    CHECK(same_direction(d41.at(0, 0), dir_x));
    CHECK(same_direction(d41.at(0, 1), dir_y));
    CHECK(same_direction(d41.at(0, 2), dir_z));
    CHECK(same_direction(d41.at(0, 3), dir_x));
    CHECK(same_direction(d41.at(1, 0), dir_y));
    CHECK(same_direction(d41.at(1, 1), dir_x));
    CHECK(same_direction(d41.at(1, 2), dir_z));
}

TEST_CASE("streaming pattern curve equals the materialized fixed-pattern SLE") {
    const PureState         ghz4 = make_gghz(4, inv_sqrt2, inv_sqrt2);
    const MeasurementMatrix mm   = pattern_oracle(PatternFamily::GGHZ, 4, 4);
    const UnsharpnessMatrix um   = constant_um(2, 4, 0.8);

    const PatternCurve curve = pattern_le_curve(ghz4, pair01, {2, 3}, um, mm);
    const SleResult    sle   = sequential_le(ghz4, pair01, {2, 3}, um, 4, {SpaceKind::FIXED_PATTERN, mm});

    REQUIRE(curve.values.size() == 4);
    for(int r = 0; r < 4; ++r) CHECK(curve.values[r] == doctest::Approx(sle.rounds[r].sle_value).epsilon(1e-12));
    CHECK(curve.leaves == sle.rounds.back().ensemble_size);
    CHECK(curve.pruned == doctest::Approx(sle.rounds.back().pruned_mass));
    CHECK(curve.leaves == 256);

    // a Dicke instance, where the pattern matters more
    const PureState    d42 = make_dicke(4, 2);
    const auto         dm  = pattern_oracle(PatternFamily::DICKE, 4, 3, 2);
    const PatternCurve dc  = pattern_le_curve(d42, pair01, {2, 3}, constant_um(2, 3, 0.8), dm);
    const SleResult    ds  = sequential_le(d42, pair01, {2, 3}, constant_um(2, 3, 0.8), 3, {SpaceKind::FIXED_PATTERN, dm});
    for(int r = 0; r < 3; ++r) CHECK(dc.values[r] == doctest::Approx(ds.rounds[r].sle_value).epsilon(1e-12));
}

TEST_CASE("serial and OpenMP objectives are bit-identical") {
    Ensemble ens = ensemble_from_state(embedded_random4(23));
    ens          = measure_round(ens, {2, 3}, {0.8, 0.8}, {dir_x, dir_y}, {.target_pair = pair01});

    set_exec_mode(ExecMode::Serial);
    const RoundEval a = round_objective(ens, pair01, {2, 3}, {0.8, 0.8}, {dir_y, dir_x});
    set_exec_mode(ExecMode::OpenMP);
    const RoundEval b = round_objective(ens, pair01, {2, 3}, {0.8, 0.8}, {dir_y, dir_x});
    CHECK(a.value == b.value); // exact equality, not approximate
    CHECK(a.kept == b.kept);

    const PureState    ghz4 = make_gghz(4, inv_sqrt2, inv_sqrt2);
    const auto         mm   = pattern_oracle(PatternFamily::GGHZ, 4, 3);
    set_exec_mode(ExecMode::Serial);
    const PatternCurve cs = pattern_le_curve(ghz4, pair01, {2, 3}, constant_um(2, 3, 0.8), mm);
    set_exec_mode(ExecMode::OpenMP);
    const PatternCurve cp = pattern_le_curve(ghz4, pair01, {2, 3}, constant_um(2, 3, 0.8), mm);
    for(int r = 0; r < 3; ++r) CHECK(cs.values[r] == cp.values[r]);
}
