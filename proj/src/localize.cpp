#include "entloc/localize.hpp"

#include "entloc/exec.hpp"
#include "entloc/nm.hpp"
#include "entloc/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace entloc {

namespace {

    void check_geometry(int num_qubits, std::pair<int, int> pair, const std::vector<int>& assisting) {
        if(pair.first == pair.second) throw std::invalid_argument("target pair indices collide");
        if(pair.first < 0 or pair.second < 0 or pair.first >= num_qubits or pair.second >= num_qubits)
            throw std::invalid_argument("target pair index out of range");
        if(assisting.empty()) throw std::invalid_argument("empty assisting set");
        for(std::size_t j = 0; j < assisting.size(); ++j) {
            const int q = assisting[j];
            if(q < 0 or q >= num_qubits) throw std::invalid_argument("assisting qubit out of range");
            if(q == pair.first or q == pair.second)
                throw std::invalid_argument("assisting qubit " + std::to_string(q) + " collides with the target pair");
            if(j > 0 and assisting[j - 1] >= q)
                throw std::invalid_argument("assisting qubits must be listed in ascending order");
        }
    }

    // bookkeeping for the pair-block kernel: the register splits into the pair
    // (4 offsets) and the rest space, compressed with qubit order preserved
    struct RestLayout {
        std::size_t              restdim = 0;
        std::vector<std::size_t> expand;       // rest index -> full index, pair bits 0
        std::size_t              off[4]{};     // pair-bit offsets, first pair qubit is the high bit
        std::vector<std::size_t> stride;       // per assisting qubit inside the rest space
    };

    RestLayout build_layout(int n, std::pair<int, int> pair, const std::vector<int>& assisting) {
        RestLayout       L;
        const std::size_t s1 = qubit_stride(pair.first, n);
        const std::size_t s2 = qubit_stride(pair.second, n);
        L.off[0] = 0;
        L.off[1] = s2;
        L.off[2] = s1;
        L.off[3] = s1 | s2;

        std::vector<int> rest;
        for(int q = 0; q < n; ++q)
            if(q != pair.first and q != pair.second) rest.push_back(q);
        const int nr = static_cast<int>(rest.size());
        L.restdim    = std::size_t{1} << nr;
        L.expand.resize(L.restdim);
        for(std::size_t r = 0; r < L.restdim; ++r) {
            std::size_t full = 0;
            for(int j = 0; j < nr; ++j)
                if((r >> (nr - 1 - j)) & 1u) full |= qubit_stride(rest[j], n);
            L.expand[r] = full;
        }
        L.stride.resize(assisting.size());
        for(std::size_t j = 0; j < assisting.size(); ++j) {
            const auto pos = std::find(rest.begin(), rest.end(), assisting[j]) - rest.begin();
            L.stride[j]    = std::size_t{1} << (nr - 1 - static_cast<int>(pos));
        }
        return L;
    }

    inline void apply2_strided(cplx* v, std::size_t dim, std::size_t stride, const Mat2& op) {
        for(std::size_t base = 0; base < dim; base += 2 * stride) {
            for(std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                const cplx        a0 = v[i0];
                const cplx        a1 = v[i1];
                v[i0] = op[0] * a0 + op[1] * a1;
                v[i1] = op[2] * a0 + op[3] * a1;
            }
        }
    }

    // sum of |negative eigenvalues| of the partial transpose of an unnormalized
    // 4x4 pair matrix; scales linearly, so no per-child normalization is needed
    inline double negative_part_pt(const Mat4& g) {
        const auto eig = jacobi4_eigenvalues(partial_transpose(g));
        double     neg = 0.0;
        for(double e : eig)
            if(e < 0.0) neg -= e;
        return neg;
    }

}

RoundEval round_objective(const Ensemble& ens, std::pair<int, int> pair,
                          const std::vector<int>& assisting,
                          const std::vector<double>& etas,
                          const std::vector<Direction>& dirs,
                          double prune_eps) {
    if(ens.branches.empty()) throw std::invalid_argument("round_objective: empty ensemble");
    const int n = ens.branches.front().state.num_qubits;
    check_geometry(n, pair, assisting);
    const int nb = static_cast<int>(assisting.size());
    if(etas.size() != assisting.size() or dirs.size() != assisting.size())
        throw std::invalid_argument("round_objective: etas/dirs length must equal |assisting|");

    const RestLayout L      = build_layout(n, pair, assisting);
    const std::size_t combos = std::size_t{1} << nb;

    std::vector<Mat2> kp(nb), km(nb);
    for(int j = 0; j < nb; ++j) {
        kp[j] = kraus_operator(+1, etas[j], dirs[j]).m;
        km[j] = kraus_operator(-1, etas[j], dirs[j]).m;
    }

    const std::size_t   n_parents = ens.branches.size();
    std::vector<double> part_val(n_parents), part_pruned(n_parents);
    std::vector<std::size_t> part_kept(n_parents);

    parallel_for(n_parents, [&](std::size_t pi) {
        thread_local std::vector<cplx> psi, chi;
        psi.resize(4 * L.restdim);
        chi.resize(4 * L.restdim);

        const Branch& parent = ens.branches[pi];
        for(int a = 0; a < 4; ++a)
            for(std::size_t r = 0; r < L.restdim; ++r) psi[a * L.restdim + r] = parent.state.amp[L.expand[r] + L.off[a]];

        double      acc = 0.0, pruned = 0.0;
        std::size_t kept = 0;
        for(std::size_t c = 0; c < combos; ++c) {
            std::copy(psi.begin(), psi.end(), chi.begin());
            for(int j = 0; j < nb; ++j) {
                const Mat2& k = ((c >> (nb - 1 - j)) & 1u) ? km[j] : kp[j];
                for(int a = 0; a < 4; ++a) apply2_strided(chi.data() + a * L.restdim, L.restdim, L.stride[j], k);
            }
            // Gram matrix of the evolved pair blocks = unnormalized child pair state
            Mat4 g;
            for(int a = 0; a < 4; ++a) {
                for(int b = 0; b <= a; ++b) {
                    cplx acc_ab{0.0, 0.0};
                    const cplx* va = chi.data() + a * L.restdim;
                    const cplx* vb = chi.data() + b * L.restdim;
                    for(std::size_t r = 0; r < L.restdim; ++r) acc_ab += va[r] * std::conj(vb[r]);
                    g[a * 4 + b] = acc_ab;
                    g[b * 4 + a] = std::conj(acc_ab);
                }
            }
            const double child_prob = parent.probability * (g[0].real() + g[5].real() + g[10].real() + g[15].real());
            if(child_prob <= prune_eps) {
                pruned += std::max(child_prob, 0.0);
                continue;
            }
            ++kept;
            acc += parent.probability * negative_part_pt(g);
        }
        part_val[pi]    = acc;
        part_pruned[pi] = pruned;
        part_kept[pi]   = kept;
    });

    RoundEval out;
    for(std::size_t pi = 0; pi < n_parents; ++pi) { // serial, index order: deterministic
        out.value += part_val[pi];
        out.pruned += part_pruned[pi];
        out.kept += part_kept[pi];
    }
    return out;
}

namespace {

    const Direction pauli_axes[3] = {dir_z, dir_x, dir_y}; // canonical (theta, phi) order

    int axis_index(const Direction& d) {
        for(int i = 0; i < 3; ++i)
            if(same_direction(d, pauli_axes[i], 1e-9)) return i;
        return -1;
    }

    struct RoundOpt {
        std::vector<Direction> dirs;
        double                 value = 0.0;
        std::size_t            kept  = 0;
        double                 pruned = 0.0;
    };

    std::vector<Direction> canonical_dirs(const double* x, int nb) {
        std::vector<Direction> d(nb);
        for(int j = 0; j < nb; ++j) d[j] = normalize_direction(x[2 * j], x[2 * j + 1]);
        return d;
    }

    // quantized lexicographic order over (theta, phi) per qubit; resolves the
    // phi-degenerate optima to a reproducible representative
    bool quant_less(const std::vector<Direction>& a, const std::vector<Direction>& b) {
        for(std::size_t j = 0; j < a.size(); ++j) {
            const long long ta = std::llround(a[j].theta * 1e6), tb = std::llround(b[j].theta * 1e6);
            if(ta != tb) return ta < tb;
            const long long pa = std::llround(a[j].phi * 1e6), pb = std::llround(b[j].phi * 1e6);
            if(pa != pb) return pa < pb;
        }
        return false;
    }

    // enumerate per-qubit option lists (odometer, last qubit fastest)
    template<typename Yield>
    void cartesian_dirs(const std::vector<std::vector<Direction>>& options, Yield&& yield) {
        const int        nb = static_cast<int>(options.size());
        std::vector<int> idx(nb, 0);
        while(true) {
            std::vector<Direction> dirs(nb);
            for(int j = 0; j < nb; ++j) dirs[j] = options[j][idx[j]];
            yield(dirs);
            int j = nb - 1;
            while(j >= 0 and ++idx[j] == static_cast<int>(options[j].size())) idx[j--] = 0;
            if(j < 0) break;
        }
    }

    RoundOpt best_of_candidates(const Ensemble& ens, std::pair<int, int> pair,
                                const std::vector<int>& assisting, const std::vector<double>& etas,
                                const std::vector<std::vector<Direction>>& candidates,
                                double prune_eps) {
        RoundOpt best;
        bool     first = true;
        for(const auto& dirs : candidates) {
            const RoundEval ev = round_objective(ens, pair, assisting, etas, dirs, prune_eps);
            if(first or ev.value > best.value) {
                best  = RoundOpt{dirs, ev.value, ev.kept, ev.pruned};
                first = false;
            }
        }
        return best;
    }

    RoundOpt optimize_full_sphere(const Ensemble& ens, std::pair<int, int> pair,
                                  const std::vector<int>& assisting, const std::vector<double>& etas,
                                  double prune_eps) {
        const int nb = static_cast<int>(assisting.size());

        // seeds: a coarse sphere grid (shared direction for nb >= 2, which is
        // where the family optima live) plus every Pauli product
        std::vector<std::vector<Direction>> grid;
        const int n_theta = (nb == 1) ? 12 : 6;
        const int n_phi   = (nb == 1) ? 24 : 12;
        for(int i = 0; i < n_theta; ++i) {
            for(int j = 0; j < n_phi; ++j) {
                const Direction d{(i + 0.5) * pi / n_theta, j * 2.0 * pi / n_phi};
                grid.push_back(std::vector<Direction>(nb, d));
            }
        }
        {
            std::vector<std::vector<Direction>> axes(nb, {pauli_axes[0], pauli_axes[1], pauli_axes[2]});
            cartesian_dirs(axes, [&](const std::vector<Direction>& dirs) { grid.push_back(dirs); });
        }

        std::vector<double> value(grid.size());
        for(std::size_t i = 0; i < grid.size(); ++i)
            value[i] = round_objective(ens, pair, assisting, etas, grid[i], prune_eps).value;

        std::vector<std::size_t> order(grid.size());
        for(std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] > value[b]; });

        // refine the best seeds; keep every evaluated candidate in the pool so
        // the final pick can snap back to an exact grid/Pauli representative
        struct Candidate {
            std::vector<Direction> dirs;
            double                 value;
        };
        std::vector<Candidate> pool;
        for(std::size_t i = 0; i < grid.size(); ++i) pool.push_back({grid[i], value[i]});

        const int top_k = (nb <= 2) ? 3 : 2;
        const int max_evals = (nb == 1) ? 300 : (nb == 2 ? 500 : 800);
        for(int k = 0; k < top_k and k < static_cast<int>(order.size()); ++k) {
            const auto&         seed = grid[order[k]];
            std::vector<double> x0(2 * nb);
            for(int j = 0; j < nb; ++j) {
                x0[2 * j]     = seed[j].theta;
                x0[2 * j + 1] = seed[j].phi;
            }
            auto res = nelder_mead([&](const double* x) {
                return -round_objective(ens, pair, assisting, etas, canonical_dirs(x, nb), prune_eps).value;
            }, x0, 0.15, 1e-8, max_evals);
            pool.push_back({canonical_dirs(res.x.data(), nb), -res.value});
        }

        double vmax = pool.front().value;
        for(const auto& c : pool) vmax = std::max(vmax, c.value);
        const Candidate* winner = nullptr;
        for(const auto& c : pool) {
            if(c.value < vmax - 1e-9) continue;
            if(winner == nullptr or quant_less(c.dirs, winner->dirs)) winner = &c;
        }

        const RoundEval ev = round_objective(ens, pair, assisting, etas, winner->dirs, prune_eps);
        return RoundOpt{winner->dirs, ev.value, ev.kept, ev.pruned};
    }

    RoundOpt optimize_round(const Ensemble& ens, std::pair<int, int> pair,
                            const std::vector<int>& assisting, const std::vector<double>& etas,
                            const SearchSpace& space, int round_1based,
                            const std::vector<Direction>* prev, double prune_eps) {
        const int nb = static_cast<int>(assisting.size());
        switch(space.kind) {
            case SpaceKind::FULL_SPHERE: return optimize_full_sphere(ens, pair, assisting, etas, prune_eps);
            case SpaceKind::PAULI: {
                std::vector<std::vector<Direction>> axes(nb, {pauli_axes[0], pauli_axes[1], pauli_axes[2]});
                std::vector<std::vector<Direction>> candidates;
                cartesian_dirs(axes, [&](const std::vector<Direction>& d) { candidates.push_back(d); });
                return best_of_candidates(ens, pair, assisting, etas, candidates, prune_eps);
            }
            case SpaceKind::OPS: {
                // greedy: any Pauli in round 1, then orthogonal to the previous
                // round per qubit (distinct Pauli axes are orthogonal)
                std::vector<std::vector<Direction>> axes(nb);
                for(int j = 0; j < nb; ++j) {
                    if(round_1based == 1 or prev == nullptr) {
                        axes[j] = {pauli_axes[0], pauli_axes[1], pauli_axes[2]};
                    } else {
                        const int prev_axis = axis_index((*prev)[j]);
                        if(prev_axis < 0) throw std::logic_error("OPS search: previous round direction is not a Pauli axis");
                        for(int i = 0; i < 3; ++i)
                            if(i != prev_axis) axes[j].push_back(pauli_axes[i]);
                    }
                }
                std::vector<std::vector<Direction>> candidates;
                cartesian_dirs(axes, [&](const std::vector<Direction>& d) { candidates.push_back(d); });
                return best_of_candidates(ens, pair, assisting, etas, candidates, prune_eps);
            }
            case SpaceKind::FIXED_PATTERN: {
                if(not space.pattern) throw std::invalid_argument("FIXED_PATTERN search needs a pattern matrix");
                if(space.pattern->nb != nb or space.pattern->rounds < round_1based)
                    throw std::invalid_argument("pattern matrix shape does not cover this round");
                const std::vector<Direction> dirs = space.pattern->column(round_1based - 1);
                const RoundEval              ev   = round_objective(ens, pair, assisting, etas, dirs, prune_eps);
                return RoundOpt{dirs, ev.value, ev.kept, ev.pruned};
            }
        }
        throw std::logic_error("optimize_round: unknown search space");
    }

}

SingleRoundResult single_round_le(const PureState& s, std::pair<int, int> pair,
                                  const std::vector<int>& assisting,
                                  const std::vector<double>& etas,
                                  const SearchSpace& space) {
    if(std::abs(norm_squared(s) - 1.0) > 1e-9) throw std::invalid_argument("single_round_le: state not normalized");
    if(etas.size() != assisting.size()) throw std::invalid_argument("single_round_le: etas length must equal |assisting|");
    const Ensemble ens = ensemble_from_state(s);
    const RoundOpt opt = optimize_round(ens, pair, assisting, etas, space, 1, nullptr, eps_prob);
    return SingleRoundResult{opt.value, opt.dirs};
}

SleResult sequential_le(const PureState& s, std::pair<int, int> pair,
                        const std::vector<int>& assisting,
                        const UnsharpnessMatrix& um, int rounds,
                        const SearchSpace& space, const SleOpts& opts) {
    if(rounds < 1) throw std::invalid_argument("sequential_le: need at least one round");
    if(um.nb != static_cast<int>(assisting.size()) or um.rounds < rounds)
        throw std::invalid_argument("sequential_le: unsharpness matrix shape mismatch");
    if(std::abs(norm_squared(s) - 1.0) > 1e-9) throw std::invalid_argument("sequential_le: state not normalized");

    SleResult result;
    Ensemble  ens = ensemble_from_state(s);
    std::vector<Direction> prev;
    for(int r = 1; r <= rounds; ++r) {
        const std::vector<double> etas = um.column(r - 1);
        const RoundOpt            opt  = optimize_round(ens, pair, assisting, etas, space, r,
                                                        prev.empty() ? nullptr : &prev, opts.prune_eps);

        RoundRecord rec;
        rec.round         = r;
        rec.optimal_dirs  = opt.dirs;
        rec.sle_value     = opt.value;
        rec.ensemble_size = opt.kept;
        rec.dedup_size    = opt.kept;
        rec.pruned_mass   = ens.pruned_mass + opt.pruned;

        const bool materialize = (r < rounds) or opts.keep_final_ensemble;
        if(materialize) {
            MeasureOpts mo;
            mo.target_pair = pair;
            mo.prune_eps   = opts.prune_eps;
            ens = measure_round(ens, assisting, etas, opt.dirs, mo);
            rec.ensemble_size = ens.branches.size();
            rec.pruned_mass   = ens.pruned_mass;
            if(opts.dedup) ens = dedup(ens);
            rec.dedup_size = ens.branches.size();
        }
        result.rounds.push_back(rec);
        prev = opt.dirs;
    }
    if(opts.keep_final_ensemble) result.final_ensemble = std::move(ens);
    return result;
}

GleResult global_le(const PureState& s, std::pair<int, int> pair,
                    const std::vector<int>& assisting,
                    const UnsharpnessMatrix& um, int rounds) {
    const int nb = static_cast<int>(assisting.size());
    if(rounds < 1) throw std::invalid_argument("global_le: need at least one round");
    if(rounds * nb > 4) throw std::invalid_argument("global_le: instance too large (R * |assisting| must be <= 4)");
    if(um.nb != nb or um.rounds < rounds) throw std::invalid_argument("global_le: unsharpness matrix shape mismatch");

    const Ensemble base = ensemble_from_state(s);
    const auto     objective = [&](const double* x) {
        Ensemble ens = base;
        for(int r = 0; r < rounds; ++r) {
            const std::vector<Direction> dirs = canonical_dirs(x + 2 * nb * r, nb);
            if(r + 1 < rounds) {
                MeasureOpts mo;
                mo.target_pair = pair;
                ens = measure_round(ens, assisting, um.column(r), dirs, mo);
            } else {
                return round_objective(ens, pair, assisting, um.column(r), dirs).value;
            }
        }
        return 0.0; // unreachable
    };

    // seeds: the greedy sequential solution plus fixed-seed random restarts
    const SleResult     sle = sequential_le(s, pair, assisting, um, rounds, SearchSpace{});
    std::vector<double> sle_seed;
    for(const RoundRecord& rec : sle.rounds)
        for(const Direction& d : rec.optimal_dirs) {
            sle_seed.push_back(d.theta);
            sle_seed.push_back(d.phi);
        }

    std::vector<std::vector<double>> starts{sle_seed};
    std::mt19937_64 gen(0xC0FFEEULL);
    auto            uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * ((static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53);
    };
    for(int k = 0; k < 23; ++k) {
        std::vector<double> x(2 * nb * rounds);
        for(int i = 0; i < nb * rounds; ++i) {
            x[2 * i]     = uniform(0.0, pi);
            x[2 * i + 1] = uniform(0.0, 2.0 * pi);
        }
        starts.push_back(std::move(x));
    }

    std::vector<double>              best_val(starts.size());
    std::vector<std::vector<double>> best_x(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
        auto res    = nelder_mead([&](const double* x) { return -objective(x); }, starts[i], 0.25, 1e-9, 8000);
        best_val[i] = -res.value;
        best_x[i]   = std::move(res.x);
    });

    std::size_t win = 0;
    for(std::size_t i = 1; i < starts.size(); ++i)
        if(best_val[i] > best_val[win]) win = i;

    GleResult out;
    out.value     = best_val[win];
    out.mm.nb     = nb;
    out.mm.rounds = rounds;
    out.mm.entries.resize(static_cast<std::size_t>(nb) * rounds);
    for(int r = 0; r < rounds; ++r) {
        const std::vector<Direction> dirs = canonical_dirs(best_x[win].data() + 2 * nb * r, nb);
        for(int b = 0; b < nb; ++b) out.mm.at(b, r) = dirs[b];
    }
    return out;
}

std::vector<DeltaRecord> delta_series(DeltaFamily family, const std::vector<cplx>& coeffs,
                                      double eta, int rounds) {
    if(not(eta > 0.0 and eta <= 1.0)) throw std::invalid_argument("delta_series: eta out of (0,1]");

    PureState state;
    double    oracle = 0.0;
    if(family == DeltaFamily::GGHZ) {
        if(coeffs.size() != 2) throw std::invalid_argument("delta_series: gGHZ takes coefficients (c0, c1)");
        state  = make_gghz(3, coeffs[0], coeffs[1]);
        oracle = std::abs(coeffs[0]) * std::abs(coeffs[1]);
    } else {
        if(coeffs.size() != 3) throw std::invalid_argument("delta_series: gW takes coefficients (c1, c2, c3)");
        state  = make_gw(coeffs[0], coeffs[1], coeffs[2]);
        oracle = std::abs(coeffs[1]) * std::abs(coeffs[2]);
    }
    if(oracle < 1e-12) throw std::domain_error("delta_series: projective-measurement value is zero, ratio undefined");

    const SleResult sle = sequential_le(state, {0, 1}, {2}, constant_um(1, rounds, eta), rounds, SearchSpace{});

    std::vector<DeltaRecord> out;
    for(const RoundRecord& rec : sle.rounds) out.push_back({rec.round, std::abs(oracle - rec.sle_value) / oracle});
    return out;
}

int rounds_to_threshold(const PureState& s, std::pair<int, int> pair,
                        const std::vector<int>& assisting, double eta,
                        double epsilon, int r_max, const SearchSpace& space,
                        bool normalized) {
    if(epsilon <= 0.0) throw std::invalid_argument("rounds_to_threshold: epsilon must be positive");
    if(r_max < 1) throw std::invalid_argument("rounds_to_threshold: r_max must be at least 1");

    // reference: the projective (sharp) optimum over the full sphere
    const double pv = single_round_le(s, pair, assisting, std::vector<double>(assisting.size(), 1.0)).value;

    Ensemble               ens = ensemble_from_state(s);
    std::vector<Direction> prev;
    const std::vector<double> etas(assisting.size(), eta);
    for(int r = 1; r <= r_max; ++r) {
        const RoundOpt opt = optimize_round(ens, pair, assisting, etas, space, r,
                                            prev.empty() ? nullptr : &prev, eps_prob);
        double gap = pv - opt.value;
        if(normalized and pv > 0.0) gap /= pv;
        if(gap <= epsilon) return r;
        if(r < r_max) {
            MeasureOpts mo;
            mo.target_pair = pair;
            ens = measure_round(ens, assisting, etas, opt.dirs, mo);
        }
        prev = opt.dirs;
    }
    return rounds_not_reached;
}

OpsEnumerator::OpsEnumerator(int nb, int rounds) : nb_(nb), rounds_(rounds) {
    if(nb < 1 or rounds < 1) throw std::invalid_argument("OpsEnumerator: need nb >= 1 and rounds >= 1");
    per_qubit_ = 3ull << (rounds - 1); // 3 * 2^(R-1) per-qubit sequences
    odometer_.assign(nb, 0);
}

std::size_t OpsEnumerator::count() const {
    std::size_t c = 1;
    for(int j = 0; j < nb_; ++j) c *= per_qubit_;
    return c;
}

bool OpsEnumerator::next(MeasurementMatrix& mm) {
    if(done_) return false;
    mm.nb     = nb_;
    mm.rounds = rounds_;
    mm.entries.resize(static_cast<std::size_t>(nb_) * rounds_);

    for(int b = 0; b < nb_; ++b) {
        // decode: leading trit picks round 1, then one bit per later round
        // selects between the two axes orthogonal to the previous one
        const std::size_t id   = odometer_[b];
        const std::size_t bits = id & ((std::size_t{1} << (rounds_ - 1)) - 1);
        int               axis = static_cast<int>(id >> (rounds_ - 1));
        mm.at(b, 0)            = pauli_axes[axis];
        for(int r = 1; r < rounds_; ++r) {
            const int pick = static_cast<int>((bits >> (rounds_ - 1 - r)) & 1u);
            int       alt[2], k = 0;
            for(int i = 0; i < 3; ++i)
                if(i != axis) alt[k++] = i;
            axis        = alt[pick];
            mm.at(b, r) = pauli_axes[axis];
        }
    }

    int b = nb_ - 1; // advance, last qubit fastest
    while(b >= 0 and ++odometer_[b] == per_qubit_) odometer_[b--] = 0;
    if(b < 0) done_ = true;
    return true;
}

std::vector<MeasurementMatrix> ops_enumerate(int nb, int rounds) {
    OpsEnumerator en(nb, rounds);
    if(en.count() > 1000000) throw std::length_error("ops_enumerate: too many matrices to materialize, use OpsEnumerator");
    std::vector<MeasurementMatrix> out;
    out.reserve(en.count());
    MeasurementMatrix mm;
    while(en.next(mm)) out.push_back(mm);
    return out;
}

MeasurementMatrix pattern_oracle(PatternFamily family, int n, int rounds, int n1) {
    if(rounds < 1) throw std::invalid_argument("pattern_oracle: need at least one round");
    if(n < 3) throw std::invalid_argument("pattern_oracle: need at least one assisting qubit");
    MeasurementMatrix mm;
    mm.nb     = n - 2;
    mm.rounds = rounds;
    mm.entries.resize(static_cast<std::size_t>(mm.nb) * rounds);

    if(family == PatternFamily::GGHZ) {
        // rows alternate [x y x y ...] / [y x y x ...]
        for(int b = 0; b < mm.nb; ++b)
            for(int r = 0; r < rounds; ++r) mm.at(b, r) = ((b + r) % 2 == 0) ? dir_x : dir_y;
        return mm;
    }
    if(family == PatternFamily::DICKE) {
        if(n1 < 0 or n1 > n) throw std::invalid_argument("pattern_oracle: Dicke needs 0 <= n1 <= n");
        const bool central = (n % 2 == 0 and 2 * n1 == n) or (n % 2 == 1 and (2 * n1 == n - 1 or 2 * n1 == n + 1));
        if(central) {
            for(int b = 0; b < mm.nb; ++b)
                for(int r = 0; r < rounds; ++r) mm.at(b, r) = (r % 2 == 0) ? dir_z : dir_x;
        } else {
            // rows alternate the cycles [x y z ...] / [y x z ...]
            const Direction even_row[3] = {dir_x, dir_y, dir_z};
            const Direction odd_row[3]  = {dir_y, dir_x, dir_z};
            for(int b = 0; b < mm.nb; ++b)
                for(int r = 0; r < rounds; ++r) mm.at(b, r) = (b % 2 == 0) ? even_row[r % 3] : odd_row[r % 3];
        }
        return mm;
    }
    throw std::invalid_argument("pattern_oracle: unsupported family");
}

namespace {

    // depth-first walk of the full outcome tree with per-depth scratch states,
    // so the hot path never allocates; trees of ~10^9 nodes must stay cheap
    struct PatternScan {
        std::pair<int, int>            pair;
        std::vector<int>               assisting;
        int                            rounds = 0;
        std::vector<std::vector<Mat2>> kplus, kminus; // [round][assisting qubit]
        std::vector<PureState>         scratch;       // [depth]
        std::vector<double>            acc;           // acc[r-1]: avg negativity after round r
        double                         pruned = 0.0;
        std::size_t                    leaves = 0;

        void dfs(int depth, double prob) {
            const PureState& state = scratch[depth];
            acc[depth - 1] += prob * negative_part_pt(reduced_density(state, pair.first, pair.second));
            if(depth == rounds) {
                ++leaves;
                return;
            }

            const int         nb     = static_cast<int>(assisting.size());
            const std::size_t combos = std::size_t{1} << nb;
            for(std::size_t c = 0; c < combos; ++c) {
                PureState& child = scratch[depth + 1];
                child.num_qubits = state.num_qubits;
                child.amp        = state.amp; // reuses capacity after the first visit
                for(int j = 0; j < nb; ++j)
                    apply_single_qubit_op_inplace(child, assisting[j],
                                                  ((c >> (nb - 1 - j)) & 1u) ? kminus[depth][j] : kplus[depth][j]);
                const double n2 = norm_squared(child);
                const double p  = prob * n2;
                if(p <= eps_prob) {
                    pruned += std::max(p, 0.0);
                    continue;
                }
                const double scale = 1.0 / std::sqrt(n2);
                for(auto& a : child.amp) a *= scale;
                dfs(depth + 1, p);
            }
        }
    };

}

PatternCurve pattern_le_curve(const PureState& s, std::pair<int, int> pair,
                              const std::vector<int>& assisting,
                              const UnsharpnessMatrix& um, const MeasurementMatrix& mm) {
    check_geometry(s.num_qubits, pair, assisting);
    if(um.nb != static_cast<int>(assisting.size()) or mm.nb != um.nb or mm.rounds < um.rounds)
        throw std::invalid_argument("pattern_le_curve: plan shape mismatch");
    if(std::abs(norm_squared(s) - 1.0) > 1e-9) throw std::invalid_argument("pattern_le_curve: state not normalized");

    const int rounds = um.rounds;
    const int nb     = static_cast<int>(assisting.size());

    std::vector<std::vector<Mat2>> kplus(rounds, std::vector<Mat2>(nb)), kminus = kplus;
    for(int r = 0; r < rounds; ++r) {
        for(int j = 0; j < nb; ++j) {
            kplus[r][j]  = kraus_operator(+1, um.at(j, r), mm.at(j, r)).m;
            kminus[r][j] = kraus_operator(-1, um.at(j, r), mm.at(j, r)).m;
        }
    }

    PatternCurve out;
    out.values.assign(rounds, 0.0);

    // materialize only the first round, then fan the subtrees out to tasks;
    // the ordered reduction keeps serial and OpenMP results bit-identical
    const std::size_t      combos = std::size_t{1} << nb;
    std::vector<PureState> top_states;
    std::vector<double>    top_probs;
    for(std::size_t c = 0; c < combos; ++c) {
        PureState child = s;
        for(int j = 0; j < nb; ++j)
            apply_single_qubit_op_inplace(child, assisting[j], ((c >> (nb - 1 - j)) & 1u) ? kminus[0][j] : kplus[0][j]);
        const double p = norm_squared(child);
        if(p <= eps_prob) {
            out.pruned += std::max(p, 0.0);
            continue;
        }
        const double scale = 1.0 / std::sqrt(p);
        for(auto& a : child.amp) a *= scale;
        top_states.push_back(std::move(child));
        top_probs.push_back(p);
    }

    std::vector<std::vector<double>> acc(top_states.size());
    std::vector<double>              dropped(top_states.size(), 0.0);
    std::vector<std::size_t>         leaves(top_states.size(), 0);
    parallel_for(top_states.size(), [&](std::size_t i) {
        PatternScan scan;
        scan.pair      = pair;
        scan.assisting = assisting;
        scan.rounds    = rounds;
        scan.kplus     = kplus;
        scan.kminus    = kminus;
        scan.scratch.resize(rounds + 1);
        scan.acc.assign(rounds, 0.0);
        scan.scratch[1] = top_states[i];
        scan.dfs(1, top_probs[i]);
        acc[i]     = std::move(scan.acc);
        dropped[i] = scan.pruned;
        leaves[i]  = scan.leaves;
    });
    for(std::size_t i = 0; i < top_states.size(); ++i) { // serial, index order
        for(int r = 0; r < rounds; ++r) out.values[r] += acc[i][r];
        out.pruned += dropped[i];
        out.leaves += leaves[i];
    }
    return out;
}

}
