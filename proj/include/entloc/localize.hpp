#pragma once
// Optimization core: single-round localizable entanglement, greedy sequential
// optimization (SLE), joint global optimization (GLE) on tiny instances,
// Pauli / orthogonal-Pauli-set restricted searches, fixed-pattern evaluation
// and the per-family optimal-pattern oracles.

#include "entloc/branches.hpp"
#include "entloc/povm.hpp"
#include "entloc/qcore.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace entloc {

enum class SpaceKind { FULL_SPHERE, PAULI, OPS, FIXED_PATTERN };

struct SearchSpace {
    SpaceKind                        kind = SpaceKind::FULL_SPHERE;
    std::optional<MeasurementMatrix> pattern; // required for FIXED_PATTERN
};

struct RoundRecord {
    int                    round = 0; // 1-based
    std::vector<Direction> optimal_dirs;
    double                 sle_value     = 0.0;
    std::size_t            ensemble_size = 0;   // children kept after this round, pre-dedup
    std::size_t            dedup_size    = 0;   // post-dedup when deduplication ran, else == ensemble_size
    double                 pruned_mass   = 0.0; // cumulative over rounds
};

struct DeltaRecord {
    int    r     = 0;
    double delta = 0.0;
};

// average pair negativity after one more round with the given directions,
// computed per child from the 4x4 Gram matrix of Kraus-evolved pair blocks
// (no child states are materialized)
struct RoundEval {
    double      value  = 0.0;
    std::size_t kept   = 0;   // children above the pruning threshold
    double      pruned = 0.0; // probability mass dropped by this round
};
RoundEval round_objective(const Ensemble& ens, std::pair<int, int> pair,
                          const std::vector<int>& assisting,
                          const std::vector<double>& etas,
                          const std::vector<Direction>& dirs,
                          double prune_eps = eps_prob);

struct SingleRoundResult {
    double                 value = 0.0;
    std::vector<Direction> dirs;
};
SingleRoundResult single_round_le(const PureState& s, std::pair<int, int> pair,
                                  const std::vector<int>& assisting,
                                  const std::vector<double>& etas,
                                  const SearchSpace& space = {});

struct SleOpts {
    bool   dedup               = false; // dedup materialized ensembles after each round
    bool   keep_final_ensemble = false;
    double prune_eps           = eps_prob;
};
struct SleResult {
    std::vector<RoundRecord> rounds;
    std::optional<Ensemble>  final_ensemble; // only when keep_final_ensemble

    double final_value() const { return rounds.empty() ? 0.0 : rounds.back().sle_value; }
};
SleResult sequential_le(const PureState& s, std::pair<int, int> pair,
                        const std::vector<int>& assisting,
                        const UnsharpnessMatrix& um, int rounds,
                        const SearchSpace& space = {}, const SleOpts& opts = {});

// joint optimization over all R * |assisting| directions; tiny instances only
struct GleResult {
    double            value = 0.0;
    MeasurementMatrix mm;
};
GleResult global_le(const PureState& s, std::pair<int, int> pair,
                    const std::vector<int>& assisting,
                    const UnsharpnessMatrix& um, int rounds);

// shortfall of round-r sequential LE from the projective-measurement value,
// normalized by that value (|c0 c1| resp. |c2 c3|)
enum class DeltaFamily { GGHZ, GW };
std::vector<DeltaRecord> delta_series(DeltaFamily family, const std::vector<cplx>& coeffs,
                                      double eta, int rounds);

inline constexpr int rounds_not_reached = -1;

// smallest r with (PV optimum - round-r SLE) <= epsilon; with `normalized`
// the gap is divided by the PV optimum first
int rounds_to_threshold(const PureState& s, std::pair<int, int> pair,
                        const std::vector<int>& assisting, double eta,
                        double epsilon, int r_max, const SearchSpace& space = {},
                        bool normalized = false);

// all N_B x R direction matrices with per-qubit entries in {z,x,y} and
// consecutive rounds orthogonal; count = (3 * 2^(R-1))^nb
class OpsEnumerator {
    public:
    OpsEnumerator(int nb, int rounds);
    bool        next(MeasurementMatrix& mm); // false once exhausted
    std::size_t count() const;

    private:
    int                      nb_, rounds_;
    std::size_t              per_qubit_;
    std::vector<std::size_t> odometer_;
    bool                     done_ = false;
};
std::vector<MeasurementMatrix> ops_enumerate(int nb, int rounds);

enum class PatternFamily { GGHZ, DICKE };
MeasurementMatrix pattern_oracle(PatternFamily family, int n, int rounds, int n1 = -1);

// fixed-pattern SLE curve streamed depth-first (no ensembles kept): element
// r-1 is the average pair negativity after rounds 1..r
struct PatternCurve {
    std::vector<double> values;
    double              pruned = 0.0;
    std::size_t         leaves = 0; // surviving final-round branches
};
PatternCurve pattern_le_curve(const PureState& s, std::pair<int, int> pair,
                              const std::vector<int>& assisting,
                              const UnsharpnessMatrix& um, const MeasurementMatrix& mm);

}
