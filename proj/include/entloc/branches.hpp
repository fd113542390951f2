#pragma once
// Weighted ensembles of post-measurement pure states. One measurement round
// splits every branch into 2^|assisting| children in a fixed order (outcome
// +1 before -1, assisting qubits by ascending index), so repeated runs are
// bit-identical. Deduplication merges branches equal up to a global phase.

#include "entloc/povm.hpp"
#include "entloc/qcore.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace entloc {

struct Branch {
    double              probability = 1.0;
    PureState           state;
    // +-1 outcomes flattened in (qubit, round) order; requires the assisting
    // set to stay fixed across rounds, which measure_round enforces
    std::vector<int8_t> outcome_history;
};

struct Ensemble {
    std::vector<Branch> branches;
    int                 rounds_applied = 0;
    double              pruned_mass    = 0.0; // cumulative over all rounds
};

Ensemble ensemble_from_state(const PureState& s);

struct MeasureOpts {
    std::optional<std::pair<int, int>> target_pair; // if set, assisting must avoid it
    bool                               dedup_after = false;
    double                             prune_eps   = eps_prob;
};

Ensemble measure_round(const Ensemble& ens, const std::vector<int>& assisting,
                       const std::vector<double>& etas, const std::vector<Direction>& dirs,
                       const MeasureOpts& opts = {});

// merge branches whose states agree up to a global phase (|<a|b>|^2 > 1 - 1e-8);
// the surviving outcome_history is the lexicographically smallest among merged
Ensemble dedup(const Ensemble& ens);

using PairMeasure = std::function<double(const Density2Q&)>;

// sum of p * measure(reduced pair state), in deterministic branch-list order
double average_entanglement(const Ensemble& ens, std::pair<int, int> pair, const PairMeasure& measure);

}
