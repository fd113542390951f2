#include "entloc/experiments.hpp"

#include "entloc/entanglement.hpp"
#include "entloc/exec.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace entloc {

namespace {

    constexpr double inv_sqrt2 = 0.70710678118654752440;

    std::string format_real(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return buf;
    }

    const std::map<std::string, ExperimentTag>& tag_table() {
        static const std::map<std::string, ExperimentTag> t = {
            {"table1", ExperimentTag::TABLE1},           {"f_r_curve", ExperimentTag::F_R_CURVE},
            {"delta_sweep", ExperimentTag::DELTA_SWEEP}, {"rounds_vs_ggm", ExperimentTag::ROUNDS_VS_GGM},
            {"class_fraction", ExperimentTag::CLASS_FRACTION},
            {"fidelity_sweep", ExperimentTag::FIDELITY_SWEEP},
            {"sle_curve", ExperimentTag::SLE_CURVE},     {"custom", ExperimentTag::CUSTOM},
        };
        return t;
    }

    const char* space_name(SpaceKind k) {
        switch(k) {
            case SpaceKind::FULL_SPHERE: return "full";
            case SpaceKind::PAULI: return "pauli";
            case SpaceKind::OPS: return "ops";
            case SpaceKind::FIXED_PATTERN: return "pattern";
        }
        return "unknown";
    }

    ResultRow base_row(const ExperimentConfig& cfg) {
        ResultRow r;
        r.add("schema_version", result_schema_version);
        r.add("seed", static_cast<long long>(cfg.seed));
        return r;
    }

    std::vector<int> assisting_range(int n) {
        std::vector<int> a;
        for(int q = 2; q < n; ++q) a.push_back(q);
        return a;
    }

}

PureState config_state(const ExperimentConfig& cfg) {
    std::vector<double> c      = cfg.coeffs;
    const auto          renorm = [&](std::size_t want) {
        if(c.size() != want)
            throw std::invalid_argument("family '" + cfg.family + "' takes " + std::to_string(want) + " coefficients");
        double n2 = 0.0;
        for(double v : c) n2 += v * v;
        if(n2 <= 0.0) throw std::invalid_argument("family coefficients must not all vanish");
        for(double& v : c) v /= std::sqrt(n2);
    };
    if(cfg.family == "gghz") {
        if(c.empty()) c = {inv_sqrt2, inv_sqrt2};
        if(c.size() == 1) c.push_back(std::sqrt(std::max(0.0, 1.0 - c[0] * c[0])));
        renorm(2);
        return make_gghz(cfg.n, c[0], c[1]);
    }
    if(cfg.family == "gw") {
        if(c.empty()) c = {1.0, 1.0, 1.0};
        renorm(3);
        return make_gw(c[0], c[1], c[2]);
    }
    if(cfg.family == "w") return make_dicke(3, 1);
    if(cfg.family == "dicke") return make_dicke(cfg.n, cfg.n1 >= 0 ? cfg.n1 : cfg.n / 2);
    throw std::invalid_argument("unknown family '" + cfg.family + "' (gghz|gw|w|dicke)");
}

const char* experiment_name(ExperimentTag tag) {
    for(const auto& [name, t] : tag_table())
        if(t == tag) return name.c_str();
    return "unknown";
}

SpaceKind space_from_name(const std::string& s) {
    if(s == "full") return SpaceKind::FULL_SPHERE;
    if(s == "pauli") return SpaceKind::PAULI;
    if(s == "ops") return SpaceKind::OPS;
    if(s == "pattern") return SpaceKind::FIXED_PATTERN;
    throw std::invalid_argument("config: unknown search space '" + s + "' (full|pauli|ops|pattern)");
}

void ResultRow::add(const std::string& key, const std::string& v) {
    cells.push_back(Cell{key, v, Cell::Kind::TEXT, 0, 0.0});
}

void ResultRow::add(const std::string& key, double v) {
    cells.push_back(Cell{key, format_real(v), Cell::Kind::REAL, 0, v});
}

void ResultRow::add(const std::string& key, long long v) {
    cells.push_back(Cell{key, std::to_string(v), Cell::Kind::INT, v, 0.0});
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    if(rows.empty()) return "";
    std::string out;
    for(std::size_t k = 0; k < rows.front().cells.size(); ++k)
        out += (k ? "," : "") + rows.front().cells[k].key;
    out += '\n';
    for(const ResultRow& row : rows) {
        if(row.cells.size() != rows.front().cells.size())
            throw std::logic_error("to_csv: rows disagree on column count");
        for(std::size_t k = 0; k < row.cells.size(); ++k) {
            if(row.cells[k].key != rows.front().cells[k].key)
                throw std::logic_error("to_csv: rows disagree on column order");
            out += (k ? "," : "") + row.cells[k].text;
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const std::vector<ResultRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for(const ResultRow& row : rows) {
        nlohmann::ordered_json obj;
        for(const ResultRow::Cell& c : row.cells) {
            switch(c.kind) {
                case ResultRow::Cell::Kind::INT: obj[c.key] = c.i; break;
                case ResultRow::Cell::Kind::REAL: obj[c.key] = c.d; break;
                case ResultRow::Cell::Kind::TEXT: obj[c.key] = c.text; break;
            }
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

ExperimentConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch(const nlohmann::json::exception& e) { throw std::invalid_argument(std::string("config: ") + e.what()); }
    if(not j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

    ExperimentConfig cfg;
    try {
        for(const auto& [key, val] : j.items()) {
            if(key == "experiment") {
                const auto it = tag_table().find(val.get<std::string>());
                if(it == tag_table().end())
                    throw std::invalid_argument("config: unknown experiment '" + val.get<std::string>() + "'");
                cfg.experiment = it->second;
            } else if(key == "family") {
                cfg.family = val.get<std::string>();
            } else if(key == "n") {
                cfg.n = val.get<int>();
            } else if(key == "n1") {
                cfg.n1 = val.get<int>();
            } else if(key == "coeffs") {
                cfg.coeffs = val.get<std::vector<double>>();
            } else if(key == "eta") {
                cfg.eta = val.get<double>();
            } else if(key == "eta_grid") {
                cfg.eta_grid = val.get<std::vector<double>>();
            } else if(key == "c0_grid") {
                cfg.c0_grid = val.get<std::vector<double>>();
            } else if(key == "ggm_grid") {
                cfg.ggm_grid = val.get<std::vector<double>>();
            } else if(key == "r_lo") {
                cfg.r_lo = val.get<int>();
            } else if(key == "r_max") {
                cfg.r_max = val.get<int>();
            } else if(key == "sample_size") {
                cfg.sample_size = val.get<int>();
            } else if(key == "epsilon") {
                cfg.epsilon = val.get<double>();
            } else if(key == "threshold") {
                cfg.threshold = val.get<double>();
            } else if(key == "seed") {
                cfg.seed   = val.get<std::uint64_t>();
                cfg.seeded = true;
            } else if(key == "space") {
                cfg.space = space_from_name(val.get<std::string>());
            } else if(key == "n_lo") {
                cfg.n_lo = val.get<int>();
            } else if(key == "n_hi") {
                cfg.n_hi = val.get<int>();
            } else if(key == "long_running") {
                cfg.long_running = val.get<bool>();
            } else if(key == "weighted") {
                cfg.weighted = val.get<bool>();
            } else if(key == "normalized") {
                cfg.normalized = val.get<bool>();
            } else if(key == "dedup") {
                cfg.dedup = val.get<bool>();
            } else if(key == "out") {
                cfg.out_dir = val.get<std::string>();
            } else if(key == "format") {
                cfg.format = val.get<std::string>();
            } else if(key == "svg") {
                cfg.svg = val.get<bool>();
            } else {
                throw std::invalid_argument("config: unknown key '" + key + "'");
            }
        }
    } catch(const nlohmann::json::exception& e) { throw std::invalid_argument(std::string("config: ") + e.what()); }
    if(not j.contains("experiment")) throw std::invalid_argument("config: missing 'experiment' discriminator");
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if(cfg.sample_size < 1) throw std::invalid_argument("config: sample_size must be >= 1");
    if(not(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
    if(cfg.r_max < 1 or cfg.r_lo < 1 or cfg.r_lo > cfg.r_max)
        throw std::invalid_argument("config: need 1 <= r_lo <= r_max");
    if(not(cfg.eta > 0.0 and cfg.eta <= 1.0)) throw std::invalid_argument("config: eta must lie in (0,1]");
    for(double e : cfg.eta_grid)
        if(not(e > 0.0 and e <= 1.0)) throw std::invalid_argument("config: eta_grid values must lie in (0,1]");
    if(cfg.format != "csv" and cfg.format != "json") throw std::invalid_argument("config: format must be csv or json");
    if(cfg.threshold != -1.0 and not(cfg.threshold > 0.0 and cfg.threshold < 1.0))
        throw std::invalid_argument("config: threshold must lie in (0,1)");
    if(cfg.n < 3 or cfg.n > 14) throw std::invalid_argument("config: n must lie in [3,14]");
    if(cfg.n_lo > cfg.n_hi) throw std::invalid_argument("config: need n_lo <= n_hi");
    if(cfg.experiment == ExperimentTag::CLASS_FRACTION and not cfg.seeded)
        throw std::invalid_argument("config: class_fraction samples Haar states and requires an explicit seed");
}

std::vector<ResultRow> run_table1(const ExperimentConfig& cfg) {
    if(cfg.n_lo < 3 or cfg.n_hi > 7) throw std::invalid_argument("table1: N range must lie within [3,7]");

    std::vector<ResultRow> rows;
    for(int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
        const auto t0 = std::chrono::steady_clock::now();

        const PureState        state     = make_gghz(n, inv_sqrt2, inv_sqrt2);
        const std::vector<int> assisting = assisting_range(n);
        const int              nb        = n - 2;

        double      e1 = 0.0, er = 0.0, pruned = 0.0;
        std::size_t branches = 0;
        if(n <= 5) {
            const SleResult sle = sequential_le(state, {0, 1}, assisting, constant_um(nb, cfg.r_max, cfg.eta),
                                                cfg.r_max, SearchSpace{}, SleOpts{cfg.dedup, false, eps_prob});
            e1       = sle.rounds.front().sle_value;
            er       = sle.final_value();
            branches = sle.rounds.back().ensemble_size;
            pruned   = sle.rounds.back().pruned_mass;
        } else {
            // beyond N=5 the materialized tree (2^(nb*R) states) blows the
            // memory budget; the streaming evaluator walks the known-optimal
            // pattern instead, gated behind the long-running switch
            if(not cfg.long_running)
                throw BudgetError("table1: N=" + std::to_string(n) +
                                  " exceeds the in-memory branch budget; enable the long-running streaming mode");
            const MeasurementMatrix mm = pattern_oracle(PatternFamily::GGHZ, n, cfg.r_max);
            const PatternCurve curve = pattern_le_curve(state, {0, 1}, assisting, constant_um(nb, cfg.r_max, cfg.eta), mm);
            e1       = curve.values.front();
            er       = curve.values.back();
            branches = curve.leaves;
            pruned   = curve.pruned;
        }

        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);

        ResultRow row = base_row(cfg);
        row.add("N", n);
        row.add("eta", cfg.eta);
        row.add("R", cfg.r_max);
        row.add("e1_seq", e1);
        row.add("eR_seq", er);
        row.add("branches", branches);
        row.add("pruned", pruned);
        row.add("exact", pruned <= 1e-9 ? 1 : 0);
        row.add("wall_time_ms", static_cast<long long>(ms.count()));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> run_class_fraction(const ExperimentConfig& cfg) {
    FamilyTag tag;
    if(cfg.family == "ghz_class")
        tag = FamilyTag::GHZ_CLASS;
    else if(cfg.family == "w_class")
        tag = FamilyTag::W_CLASS;
    else
        throw std::invalid_argument("class_fraction: family must be ghz_class or w_class");
    if(cfg.space != SpaceKind::PAULI)
        throw std::invalid_argument("class_fraction: restricted to the pauli search space");
    if(not cfg.seeded) throw std::invalid_argument("class_fraction: requires an explicit seed");

    const std::size_t samples = static_cast<std::size_t>(cfg.sample_size);
    const SearchSpace space{SpaceKind::PAULI, std::nullopt};

    // hit[i][r-1]: sample i within epsilon of its sharp optimum after r rounds
    std::vector<std::vector<char>> hit(samples);
    parallel_for(samples, [&](std::size_t i) {
        const PureState state = sample_haar(tag, cfg.seed + i).to_state();
        const double    pv    = single_round_le(state, {0, 1}, {2}, {1.0}).value;
        const SleResult sle   = sequential_le(state, {0, 1}, {2}, constant_um(1, cfg.r_max, cfg.eta), cfg.r_max, space);
        hit[i].resize(cfg.r_max);
        for(int r = 0; r < cfg.r_max; ++r) hit[i][r] = (pv - sle.rounds[r].sle_value <= cfg.epsilon) ? 1 : 0;
    });

    std::vector<ResultRow> rows;
    for(int r = 1; r <= cfg.r_max; ++r) {
        std::size_t count = 0;
        for(std::size_t i = 0; i < samples; ++i) count += hit[i][r - 1];
        ResultRow row = base_row(cfg);
        row.add("class", cfg.family);
        row.add("eta", cfg.eta);
        row.add("epsilon", cfg.epsilon);
        row.add("sample_size", samples);
        row.add("r", r);
        row.add("fraction", static_cast<double>(count) / static_cast<double>(samples));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

    // measurement rows used in the preparation experiments: GHZ alternates
    // x,y and repeats y past round six; W uses the fixed z,x,y,z sequence
    MeasurementMatrix fidelity_mm(const std::string& family, int rounds) {
        MeasurementMatrix mm;
        mm.nb     = 1;
        mm.rounds = rounds;
        mm.entries.resize(rounds);
        if(family == "gghz") {
            if(rounds > 7) throw std::invalid_argument("fidelity_sweep: gghz sequence defined up to 7 rounds");
            for(int r = 0; r < rounds; ++r) mm.at(0, r) = (r >= 6) ? dir_y : ((r % 2 == 0) ? dir_x : dir_y);
        } else if(family == "w") {
            if(rounds > 4) throw std::invalid_argument("fidelity_sweep: w sequence defined up to 4 rounds");
            const Direction seq[4] = {dir_z, dir_x, dir_y, dir_z};
            for(int r = 0; r < rounds; ++r) mm.at(0, r) = seq[r];
        } else {
            throw std::invalid_argument("fidelity_sweep: family must be gghz or w");
        }
        return mm;
    }

    double default_threshold(const std::string& family, int rounds) {
        if(family == "w") return 0.95;
        return rounds >= 7 ? 0.98 : 0.99;
    }

    std::string history_text(const std::vector<std::int8_t>& h) {
        std::string s;
        for(std::int8_t v : h) s += (v > 0) ? '+' : '-';
        return s;
    }

}

std::vector<ResultRow> run_fidelity_sweep(const ExperimentConfig& cfg) {
    const std::string family = cfg.family.empty() ? "gghz" : cfg.family;
    const int         rounds = cfg.r_max;
    const PureState   state  = (family == "w") ? make_dicke(3, 1) : make_gghz(3, inv_sqrt2, inv_sqrt2);
    const MeasurementMatrix mm        = fidelity_mm(family, rounds);
    const double            threshold = cfg.threshold > 0.0 ? cfg.threshold : default_threshold(family, rounds);

    std::vector<ResultRow> rows;
    const auto emit = [&](double eta, std::size_t branch, const std::string& history, double probability,
                          double fidelity, double fraction) {
        ResultRow row = base_row(cfg);
        row.add("family", family);
        row.add("eta", eta);
        row.add("R", rounds);
        row.add("branch", branch);
        row.add("history", history);
        row.add("probability", probability);
        row.add("lambda_31", history.empty() or history[0] == '+' ? 1 : 0);
        row.add("fidelity", fidelity);
        row.add("threshold", threshold);
        row.add("fraction_above", fraction);
        row.add("weighted", cfg.weighted ? 1 : 0);
        rows.push_back(std::move(row));
    };

    if(cfg.eta_grid.empty()) {
        // full outcome tree at one eta; dedup stays off because the reported
        // fractions count outcome branches
        MeasureOpts mo;
        mo.target_pair = std::pair<int, int>{0, 1};
        Ensemble ens   = ensemble_from_state(state);
        for(int r = 0; r < rounds; ++r) ens = measure_round(ens, {2}, {cfg.eta}, {mm.at(0, r)}, mo);

        const std::size_t   n_branches = ens.branches.size();
        std::vector<double> fid(n_branches);
        parallel_for(n_branches, [&](std::size_t i) {
            fid[i] = bell_fidelity(reduced_density(ens.branches[i].state, 0, 1));
        });

        double above = 0.0, total = 0.0;
        for(std::size_t i = 0; i < n_branches; ++i) {
            const double w = cfg.weighted ? ens.branches[i].probability : 1.0;
            total += w;
            if(fid[i] > threshold) above += w;
        }
        const double fraction = (total > 0.0) ? above / total : 0.0;
        for(std::size_t i = 0; i < n_branches; ++i)
            emit(cfg.eta, i, history_text(ens.branches[i].outcome_history), ens.branches[i].probability, fid[i],
                 fraction);
        return rows;
    }

    // eta sweep of the all-(+1) outcome branch only
    std::vector<double> fid(cfg.eta_grid.size()), prob(cfg.eta_grid.size());
    parallel_for(cfg.eta_grid.size(), [&](std::size_t k) {
        const double eta = cfg.eta_grid[k];
        PureState    s   = state;
        double       p   = 1.0;
        for(int r = 0; r < rounds; ++r) {
            apply_single_qubit_op_inplace(s, 2, kraus_operator(+1, eta, mm.at(0, r)).m);
            const double n2 = norm_squared(s);
            p *= n2;
            const double scale = 1.0 / std::sqrt(n2);
            for(auto& a : s.amp) a *= scale;
        }
        fid[k]  = bell_fidelity(reduced_density(s, 0, 1));
        prob[k] = p;
    });
    for(std::size_t k = 0; k < cfg.eta_grid.size(); ++k)
        emit(cfg.eta_grid[k], 0, std::string(rounds, '+'), prob[k], fid[k], fid[k] > threshold ? 1.0 : 0.0);
    return rows;
}

std::vector<ResultRow> run_rounds_vs_ggm(const ExperimentConfig& cfg) {
    std::vector<double> grid = cfg.ggm_grid;
    if(grid.empty()) grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 1.0 / 3.0, 0.5};

    std::vector<ResultRow> rows;
    for(double g : grid) {
        if(not(g > 0.0 and g <= 0.5)) throw std::invalid_argument("rounds_vs_ggm: grid values must lie in (0, 0.5]");

        const PureState gghz = make_gghz(3, std::sqrt(g), std::sqrt(1.0 - g));
        if(std::abs(ggm(gghz) - g) > 1e-6)
            throw std::domain_error("rounds_vs_ggm: gGHZ construction missed the requested GGM");
        const int r_gghz = rounds_to_threshold(gghz, {0, 1}, {2}, cfg.eta, cfg.epsilon, cfg.r_max, SearchSpace{},
                                               cfg.normalized);

        // the gW family tops out at GGM 1/3; larger grid points stay gGHZ-only
        const bool paired = g <= 1.0 / 3.0 + 1e-12;
        int        r_gw   = rounds_not_reached;
        if(paired) {
            const PureState gw = make_gw(std::sqrt(std::max(0.0, 1.0 - 2.0 * g)), std::sqrt(g), std::sqrt(g));
            if(std::abs(ggm(gw) - g) > 1e-6)
                throw std::domain_error("rounds_vs_ggm: gW construction missed the requested GGM");
            r_gw = rounds_to_threshold(gw, {0, 1}, {2}, cfg.eta, cfg.epsilon, cfg.r_max, SearchSpace{}, cfg.normalized);
        }

        ResultRow row = base_row(cfg);
        row.add("eta", cfg.eta);
        row.add("epsilon", cfg.epsilon);
        row.add("normalized", cfg.normalized ? 1 : 0);
        row.add("ggm", g);
        row.add("r_gghz", r_gghz);
        if(paired)
            row.add("r_gw", r_gw);
        else
            row.add("r_gw", "");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> run_sle_curve(const ExperimentConfig& cfg) {
    const std::string family = cfg.family.empty() ? "gghz" : cfg.family;
    if(family != "gghz" and family != "dicke")
        throw std::invalid_argument("sle_curve: family must be gghz or dicke");

    std::vector<ResultRow> rows;
    for(int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
        const int              nb        = n - 2;
        const std::vector<int> assisting = assisting_range(n);
        const int              n1        = (family == "dicke") ? (cfg.n1 >= 0 ? cfg.n1 : n / 2) : -1;

        std::vector<double> values;
        double              pruned = 0.0;
        if(family == "gghz" and n <= 5) {
            const PureState state = make_gghz(n, inv_sqrt2, inv_sqrt2);
            const SleResult sle   = sequential_le(state, {0, 1}, assisting, constant_um(nb, cfg.r_max, cfg.eta),
                                                  cfg.r_max, SearchSpace{cfg.space, std::nullopt});
            for(const RoundRecord& rec : sle.rounds) values.push_back(rec.sle_value);
            pruned = sle.rounds.back().pruned_mass;
        } else {
            // streamed fixed-pattern walk; the gGHZ table treats N>=6 as
            // long-running, and any family becomes long-running from N=7 on
            const bool gate = (family == "gghz") ? (n >= 6) : (n >= 7);
            if(gate and not cfg.long_running)
                throw BudgetError("sle_curve: N=" + std::to_string(n) +
                                  " exceeds the desk budget; enable the long-running streaming mode");
            const PureState state = (family == "gghz") ? make_gghz(n, inv_sqrt2, inv_sqrt2) : make_dicke(n, n1);
            const MeasurementMatrix mm =
                (family == "gghz") ? pattern_oracle(PatternFamily::GGHZ, n, cfg.r_max)
                                   : pattern_oracle(PatternFamily::DICKE, n, cfg.r_max, n1);
            const PatternCurve curve =
                pattern_le_curve(state, {0, 1}, assisting, constant_um(nb, cfg.r_max, cfg.eta), mm);
            values = curve.values;
            pruned = curve.pruned;
        }

        for(int r = cfg.r_lo; r <= cfg.r_max; ++r) {
            ResultRow row = base_row(cfg);
            row.add("family", family);
            row.add("N", n);
            row.add("n1", n1);
            row.add("eta", cfg.eta);
            row.add("space", (family == "gghz" and n <= 5) ? space_name(cfg.space) : "pattern");
            row.add("r", r);
            row.add("value", values[r - 1]);
            row.add("exact", pruned <= 1e-9 ? 1 : 0);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<ResultRow> run_delta_sweep(const ExperimentConfig& cfg) {
    std::vector<ResultRow> rows;
    if(cfg.experiment == ExperimentTag::F_R_CURVE) {
        std::vector<double> grid = cfg.eta_grid;
        if(grid.empty())
            for(int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);

        std::vector<std::vector<DeltaRecord>> series(grid.size());
        parallel_for(grid.size(), [&](std::size_t k) {
            series[k] = delta_series(DeltaFamily::GGHZ, {inv_sqrt2, inv_sqrt2}, grid[k], cfg.r_max);
        });
        for(std::size_t k = 0; k < grid.size(); ++k) {
            for(int r = cfg.r_lo; r <= cfg.r_max; ++r) {
                const double delta = series[k][r - 1].delta;
                ResultRow    row   = base_row(cfg);
                row.add("eta", grid[k]);
                row.add("r", r);
                row.add("delta", delta);
                row.add("f", (1.0 - delta) / grid[k]); // Delta_r = 1 - eta*f_r(eta)
                rows.push_back(std::move(row));
            }
        }
        return rows;
    }

    // Delta_r * |c0 c1| against c0 at fixed eta
    std::vector<double> grid = cfg.c0_grid;
    if(grid.empty())
        for(int i = 1; i <= 14; ++i) grid.push_back(0.05 * i);
    for(double c0 : grid)
        if(not(c0 > 0.0 and c0 < 1.0)) throw std::invalid_argument("delta_sweep: c0 grid values must lie in (0,1)");

    std::vector<std::vector<DeltaRecord>> series(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) {
        const double c1 = std::sqrt(1.0 - grid[k] * grid[k]);
        series[k]       = delta_series(DeltaFamily::GGHZ, {grid[k], c1}, cfg.eta, cfg.r_max);
    });
    for(std::size_t k = 0; k < grid.size(); ++k) {
        const double c0 = grid[k];
        const double c1 = std::sqrt(1.0 - c0 * c0);
        for(int r = cfg.r_lo; r <= cfg.r_max; ++r) {
            const double delta = series[k][r - 1].delta;
            ResultRow    row   = base_row(cfg);
            row.add("eta", cfg.eta);
            row.add("c0", c0);
            row.add("r", r);
            row.add("delta", delta);
            row.add("delta_abs", delta * c0 * c1);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<ResultRow> run_custom(const ExperimentConfig& cfg) {
    const PureState        state     = config_state(cfg);
    const int              n         = state.num_qubits;
    const std::vector<int> assisting = assisting_range(n);
    const int              nb        = n - 2;
    if(nb * cfg.r_max > 24)
        throw BudgetError("custom: the materialized tree exceeds the in-memory branch budget");

    SearchSpace space{cfg.space, std::nullopt};
    if(cfg.space == SpaceKind::FIXED_PATTERN)
        space.pattern = pattern_oracle(cfg.family == "dicke" ? PatternFamily::DICKE : PatternFamily::GGHZ, n,
                                       cfg.r_max, cfg.n1 >= 0 ? cfg.n1 : n / 2);

    const SleResult sle = sequential_le(state, {0, 1}, assisting, constant_um(nb, cfg.r_max, cfg.eta), cfg.r_max,
                                        space, SleOpts{cfg.dedup, false, eps_prob});

    std::vector<ResultRow> rows;
    for(const RoundRecord& rec : sle.rounds) {
        std::string dirs;
        for(std::size_t j = 0; j < rec.optimal_dirs.size(); ++j) {
            if(j) dirs += '|';
            dirs += format_real(rec.optimal_dirs[j].theta) + ":" + format_real(rec.optimal_dirs[j].phi);
        }
        ResultRow row = base_row(cfg);
        row.add("family", cfg.family);
        row.add("n", n);
        row.add("eta", cfg.eta);
        row.add("space", space_name(cfg.space));
        row.add("r", rec.round);
        row.add("value", rec.sle_value);
        row.add("dirs", dirs);
        row.add("branches", rec.ensemble_size);
        row.add("dedup_size", rec.dedup_size);
        row.add("pruned", rec.pruned_mass);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    switch(cfg.experiment) {
        case ExperimentTag::TABLE1: return run_table1(cfg);
        case ExperimentTag::F_R_CURVE: return run_delta_sweep(cfg);
        case ExperimentTag::DELTA_SWEEP: return run_delta_sweep(cfg);
        case ExperimentTag::ROUNDS_VS_GGM: return run_rounds_vs_ggm(cfg);
        case ExperimentTag::CLASS_FRACTION: return run_class_fraction(cfg);
        case ExperimentTag::FIDELITY_SWEEP: return run_fidelity_sweep(cfg);
        case ExperimentTag::SLE_CURVE: return run_sle_curve(cfg);
        case ExperimentTag::CUSTOM: return run_custom(cfg);
    }
    throw std::logic_error("run_experiment: unknown tag");
}

namespace {

    double cell_as_real(const ResultRow& row, const std::string& key) {
        for(const auto& c : row.cells)
            if(c.key == key) return c.kind == ResultRow::Cell::Kind::INT ? static_cast<double>(c.i) : c.d;
        throw std::logic_error("svg: missing column " + key);
    }

    std::string cell_as_text(const ResultRow& row, const std::string& key) {
        for(const auto& c : row.cells)
            if(c.key == key) return c.text;
        return "";
    }

    void collect_series(SvgSeries& out, const std::string& label, double x, double y) {
        for(auto& [name, pts] : out) {
            if(name == label) {
                pts.emplace_back(x, y);
                return;
            }
        }
        out.push_back({label, {{x, y}}});
    }

}

SvgSeries svg_series(ExperimentTag tag, const std::vector<ResultRow>& rows) {
    SvgSeries out;
    for(const ResultRow& row : rows) {
        switch(tag) {
            case ExperimentTag::TABLE1:
                collect_series(out, "e1_seq", cell_as_real(row, "N"), cell_as_real(row, "e1_seq"));
                collect_series(out, "eR_seq", cell_as_real(row, "N"), cell_as_real(row, "eR_seq"));
                break;
            case ExperimentTag::F_R_CURVE:
                collect_series(out, "r=" + cell_as_text(row, "r"), cell_as_real(row, "eta"), cell_as_real(row, "f"));
                break;
            case ExperimentTag::DELTA_SWEEP:
                collect_series(out, "r=" + cell_as_text(row, "r"), cell_as_real(row, "c0"),
                               cell_as_real(row, "delta_abs"));
                break;
            case ExperimentTag::ROUNDS_VS_GGM:
                collect_series(out, "gghz", cell_as_real(row, "ggm"), cell_as_real(row, "r_gghz"));
                if(not cell_as_text(row, "r_gw").empty())
                    collect_series(out, "gw", cell_as_real(row, "ggm"), cell_as_real(row, "r_gw"));
                break;
            case ExperimentTag::CLASS_FRACTION:
                collect_series(out, cell_as_text(row, "class"), cell_as_real(row, "r"),
                               cell_as_real(row, "fraction"));
                break;
            case ExperimentTag::FIDELITY_SWEEP:
                collect_series(out, cell_as_text(row, "family"), cell_as_real(row, "eta"),
                               cell_as_real(row, "fidelity"));
                break;
            case ExperimentTag::SLE_CURVE:
                collect_series(out, cell_as_text(row, "family") + " N=" + cell_as_text(row, "N"),
                               cell_as_real(row, "r"), cell_as_real(row, "value"));
                break;
            case ExperimentTag::CUSTOM:
                collect_series(out, "value", cell_as_real(row, "r"), cell_as_real(row, "value"));
                break;
        }
    }
    return out;
}

std::string to_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                   const SvgSeries& series) {
    const int    width = 720, height = 480;
    const double ml = 70, mr = 160, mt = 40, mb = 50; // margins, legend on the right

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool   first = true;
    for(const auto& [name, pts] : series) {
        for(const auto& [x, y] : pts) {
            if(first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first       = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if(xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if(ymax - ymin < 1e-12) ymax = ymin + 1.0;

    const auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto sy = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "  <text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
        << "</text>\n";
    svg << "  <line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    svg << "  <text x=\"18\" y=\"" << (mt + height - mb) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";
    for(int k = 0; k < 2; ++k) { // min/max tick labels per axis
        const double xv = k ? xmax : xmin, yv = k ? ymax : ymin;
        svg << "  <text x=\"" << sx(xv) << "\" y=\"" << height - mb + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">" << format_real(xv) << "</text>\n";
        svg << "  <text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
            << format_real(yv) << "</text>\n";
    }
    int idx = 0;
    for(const auto& [name, pts] : series) {
        const char* color = palette[idx % 7];
        svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for(const auto& [x, y] : pts) svg << sx(x) << "," << sy(y) << " ";
        svg << "\"/>\n";
        svg << "  <text x=\"" << width - mr + 10 << "\" y=\"" << mt + 16 * idx + 10 << "\" font-size=\"11\" fill=\""
            << color << "\">" << name << "</text>\n";
        ++idx;
    }
    svg << "</svg>\n";
    return svg.str();
}

}
