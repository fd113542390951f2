#include "entloc/branches.hpp"

#include "entloc/exec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace entloc {

Ensemble ensemble_from_state(const PureState& s) {
    Ensemble ens;
    ens.branches.push_back(Branch{1.0, s, {}});
    return ens;
}

Ensemble measure_round(const Ensemble& ens, const std::vector<int>& assisting,
                       const std::vector<double>& etas, const std::vector<Direction>& dirs,
                       const MeasureOpts& opts) {
    if(ens.branches.empty()) throw std::invalid_argument("measure_round: empty ensemble");
    if(assisting.empty()) throw std::invalid_argument("measure_round: empty assisting set");
    if(etas.size() != assisting.size() or dirs.size() != assisting.size())
        throw std::invalid_argument("measure_round: etas/dirs length must equal |assisting|");

    const int num_qubits = ens.branches.front().state.num_qubits;
    for(int q : assisting) {
        if(q < 0 or q >= num_qubits) throw std::invalid_argument("measure_round: assisting qubit out of range");
        if(std::count(assisting.begin(), assisting.end(), q) != 1)
            throw std::invalid_argument("measure_round: duplicate assisting qubit " + std::to_string(q));
        if(opts.target_pair and (q == opts.target_pair->first or q == opts.target_pair->second))
            throw std::invalid_argument("measure_round: assisting qubit " + std::to_string(q) + " collides with the target pair");
    }

    // children are ordered by ascending qubit index regardless of caller order
    const int        nb = static_cast<int>(assisting.size());
    std::vector<int> perm(nb);
    for(int j = 0; j < nb; ++j) perm[j] = j;
    std::sort(perm.begin(), perm.end(), [&](int i, int j) { return assisting[i] < assisting[j]; });

    std::vector<int>    qubits(nb);
    std::vector<Mat2>   kraus_plus(nb), kraus_minus(nb);
    for(int j = 0; j < nb; ++j) {
        qubits[j]      = assisting[perm[j]];
        kraus_plus[j]  = kraus_operator(+1, etas[perm[j]], dirs[perm[j]]).m;
        kraus_minus[j] = kraus_operator(-1, etas[perm[j]], dirs[perm[j]]).m;
    }

    const int         prev_rounds = ens.rounds_applied;
    const std::size_t combos      = std::size_t{1} << nb;
    const std::size_t n_parents   = ens.branches.size();

    for(const Branch& b : ens.branches)
        if(b.outcome_history.size() != static_cast<std::size_t>(nb) * prev_rounds)
            throw std::logic_error("measure_round: assisting set must stay fixed across rounds");

    // parallel map into a pre-sized table, then one ordered serial assembly
    std::vector<Branch> table(n_parents * combos);
    std::vector<char>   keep(n_parents * combos, 0);
    std::vector<double> dropped(n_parents, 0.0);

    parallel_for(n_parents, [&](std::size_t pi) {
        const Branch& parent = ens.branches[pi];
        for(std::size_t c = 0; c < combos; ++c) {
            PureState child = parent.state;
            for(int j = 0; j < nb; ++j) {
                const bool minus = (c >> (nb - 1 - j)) & 1u; // qubit j is the lexicographic major
                apply_single_qubit_op_inplace(child, qubits[j], minus ? kraus_minus[j] : kraus_plus[j]);
            }
            const double n2   = norm_squared(child);
            const double prob = parent.probability * n2;
            if(prob <= opts.prune_eps) {
                dropped[pi] += prob;
                continue;
            }
            const double scale = 1.0 / std::sqrt(n2);
            for(auto& a : child.amp) a *= scale;

            Branch& slot = table[pi * combos + c];
            slot.probability = prob;
            slot.state       = std::move(child);
            slot.outcome_history.resize(static_cast<std::size_t>(nb) * (prev_rounds + 1));
            for(int j = 0; j < nb; ++j) {
                for(int r = 0; r < prev_rounds; ++r)
                    slot.outcome_history[j * (prev_rounds + 1) + r] = parent.outcome_history[j * prev_rounds + r];
                slot.outcome_history[j * (prev_rounds + 1) + prev_rounds] = ((c >> (nb - 1 - j)) & 1u) ? -1 : +1;
            }
            keep[pi * combos + c] = 1;
        }
    });

    Ensemble out;
    out.rounds_applied = prev_rounds + 1;
    out.pruned_mass    = ens.pruned_mass;
    out.branches.reserve(n_parents * combos);
    for(std::size_t i = 0; i < table.size(); ++i)
        if(keep[i]) out.branches.push_back(std::move(table[i]));
    for(double d : dropped) out.pruned_mass += d;

    if(out.branches.empty()) throw std::runtime_error("measure_round: all children pruned");
    return opts.dedup_after ? dedup(out) : out;
}

namespace {

    // rotate so the largest-magnitude amplitude is real positive, then key on
    // the 6-decimal rounding; candidates in the same bucket are overlap-checked.
    // Among near-tied magnitudes the lowest index wins, so phase-equal states
    // with noise-level magnitude differences pick the same reference amplitude.
    void canonical_phase(PureState& s) {
        double best = 0.0;
        for(const auto& a : s.amp) best = std::max(best, std::norm(a));
        if(best <= 0.0) return;
        std::size_t k = 0;
        while(std::norm(s.amp[k]) < best * (1.0 - 1e-9)) ++k;
        const cplx factor = std::conj(s.amp[k]) / std::abs(s.amp[k]);
        for(auto& a : s.amp) a *= factor;
    }

    std::string bucket_key(const PureState& s) {
        std::string key;
        key.reserve(s.amp.size() * 20);
        char buf[48];
        for(const auto& a : s.amp) {
            // round-half-away from printf keeps equal states in equal buckets
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f;", a.real(), a.imag());
            key += buf;
        }
        return key;
    }

}

Ensemble dedup(const Ensemble& ens) {
    Ensemble out;
    out.rounds_applied = ens.rounds_applied;
    out.pruned_mass    = ens.pruned_mass;
    out.branches.reserve(ens.branches.size());

    std::unordered_map<std::string, std::vector<std::size_t>> buckets; // key -> indices into out.branches
    for(const Branch& b : ens.branches) {
        PureState canon = b.state;
        canonical_phase(canon);
        auto& bucket = buckets[bucket_key(canon)];

        bool merged = false;
        for(std::size_t idx : bucket) {
            Branch& kept = out.branches[idx];
            if(std::norm(inner_product(kept.state, b.state)) > 1.0 - 1e-8) {
                kept.probability += b.probability;
                if(std::lexicographical_compare(b.outcome_history.begin(), b.outcome_history.end(),
                                                kept.outcome_history.begin(), kept.outcome_history.end()))
                    kept.outcome_history = b.outcome_history;
                merged = true;
                break;
            }
        }
        if(not merged) {
            bucket.push_back(out.branches.size());
            out.branches.push_back(b);
        }
    }
    return out;
}

double average_entanglement(const Ensemble& ens, std::pair<int, int> pair, const PairMeasure& measure) {
    std::vector<double> vals(ens.branches.size());
    parallel_for(ens.branches.size(), [&](std::size_t i) {
        vals[i] = measure(reduced_density(ens.branches[i].state, pair.first, pair.second));
    });
    double acc = 0.0;
    for(std::size_t i = 0; i < vals.size(); ++i) acc += ens.branches[i].probability * vals[i];
    return acc;
}

}
