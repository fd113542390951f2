#include "entloc/exec.hpp"
#include "entloc/experiments.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace entloc {

namespace {

    // "a:b:c" inclusive range, "x,y,z" list, or a single number
    std::vector<double> parse_grid(const std::string& text) {
        std::vector<double> g;
        if(text.find(':') != std::string::npos) {
            double a = 0, b = 0, c = 0;
            if(std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &c) != 3 or c <= 0.0)
                throw std::invalid_argument("grid '" + text + "' must be start:stop:step with step > 0");
            const auto steps = static_cast<long long>(std::floor((b - a) / c + 1e-9));
            for(long long i = 0; i <= steps; ++i) g.push_back(std::min(a + i * c, b)); // min() guards fp drift
        } else {
            std::stringstream ss(text);
            std::string       item;
            while(std::getline(ss, item, ',')) g.push_back(std::stod(item));
        }
        if(g.empty()) throw std::invalid_argument("grid '" + text + "' is empty");
        return g;
    }

    // "3..5" or a single integer
    std::pair<int, int> parse_int_range(const std::string& text) {
        const auto pos = text.find("..");
        if(pos == std::string::npos) {
            const int v = std::stoi(text);
            return {v, v};
        }
        return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 2))};
    }

    std::pair<const char*, const char*> axis_labels(ExperimentTag tag) {
        switch(tag) {
            case ExperimentTag::TABLE1: return {"N", "LE"};
            case ExperimentTag::F_R_CURVE: return {"eta", "f_r"};
            case ExperimentTag::DELTA_SWEEP: return {"c0", "Delta_r |c0 c1|"};
            case ExperimentTag::ROUNDS_VS_GGM: return {"GGM", "rounds"};
            case ExperimentTag::CLASS_FRACTION: return {"R", "fraction"};
            case ExperimentTag::FIDELITY_SWEEP: return {"eta", "fidelity"};
            case ExperimentTag::SLE_CURVE: return {"R", "LE"};
            case ExperimentTag::CUSTOM: return {"r", "value"};
        }
        return {"x", "y"};
    }

    void write_output(const ExperimentConfig& cfg, ExperimentTag tag, const std::string& name,
                      const std::vector<ResultRow>& rows, bool svg_ok = true) {
        const std::string payload = (cfg.format == "json") ? to_json(rows) : to_csv(rows);
        if(cfg.svg and not svg_ok) throw std::invalid_argument("--svg is not available for this subcommand");
        if(cfg.out_dir.empty()) {
            if(cfg.svg) throw std::invalid_argument("--svg requires --out <dir>");
            std::cout << payload;
            return;
        }
        std::filesystem::create_directories(cfg.out_dir);
        const std::string stem      = cfg.out_dir + "/" + name;
        const std::string data_path = stem + "." + cfg.format;
        std::ofstream     f(data_path, std::ios::binary);
        if(not f) throw std::runtime_error("cannot write " + data_path);
        f << payload;
        if(cfg.svg) {
            const auto [xl, yl] = axis_labels(tag);
            std::ofstream s(stem + ".svg", std::ios::binary);
            if(not s) throw std::runtime_error("cannot write " + stem + ".svg");
            s << to_svg(name, xl, yl, svg_series(tag, rows));
        }
    }

    std::string direction_text(const std::vector<Direction>& dirs) {
        std::string out;
        for(std::size_t j = 0; j < dirs.size(); ++j) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%s%.9g:%.9g", j ? "|" : "", dirs[j].theta, dirs[j].phi);
            out += buf;
        }
        return out;
    }

}

int cli_main(int argc, char** argv) {
    CLI::App app{"localizable entanglement on a qubit pair via rounds of unsharp measurements"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    cfg.family  = "gghz";
    int  threads = 0;
    bool serial  = false;
    app.add_option("--seed", cfg.seed, "RNG seed; required for sampling experiments");
    app.add_option("--threads", threads, "worker threads, 0 = auto (ENTLOC_THREADS overrides)");
    app.add_flag("--serial", serial, "use the serial reference implementation");
    app.add_option("--out", cfg.out_dir, "output directory (default: stdout)");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--svg", cfg.svg, "also write a polyline SVG chart (needs --out)");

    // per-coefficient flags follow the closed-form notation: gghz takes c0
    // (and optionally c1), gw takes c1, c2, c3
    const double        unset = std::nan("");
    double              c0f = unset, c1f = unset, c2f = unset, c3f = unset;
    std::string         space_name = "full";
    std::vector<double> coeff_list;
    const auto          add_family = [&](CLI::App* sub, bool with_space) {
        sub->add_option("--family", cfg.family, "gghz | gw | w | dicke");
        sub->add_option("--n", cfg.n, "qubit count (gghz, dicke)");
        sub->add_option("--n1", cfg.n1, "Dicke excitation count (default floor(n/2))");
        sub->add_option("--c0", c0f, "gghz coefficient of |0...0>");
        sub->add_option("--c1", c1f, "gghz coefficient of |1...1> / first gw coefficient");
        sub->add_option("--c2", c2f, "second gw coefficient");
        sub->add_option("--c3", c3f, "third gw coefficient");
        sub->add_option("--coeffs", coeff_list, "family coefficients (normalized internally)");
        sub->add_option("--eta", cfg.eta, "degree of unsharpness in (0,1]");
        if(with_space)
            sub->add_option("--space", space_name, "search space")->check(CLI::IsMember({"full", "pauli", "ops"}));
    };

    auto* le = app.add_subcommand("le", "single-round optimal localizable entanglement");
    add_family(le, true);

    auto* sle = app.add_subcommand("sle", "greedy sequential optimization over R rounds");
    add_family(sle, true);
    sle->add_option("--rounds", cfg.r_max, "number of rounds");
    sle->add_flag("--dedup", cfg.dedup, "merge phase-equal branches between rounds");

    auto* gle = app.add_subcommand("gle", "joint global optimization (tiny instances, R*n_assist <= 4)");
    add_family(gle, false);
    gle->add_option("--rounds", cfg.r_max, "number of rounds");

    auto* fidelity = app.add_subcommand("fidelity", "per-branch Bell fidelities under the preparation patterns");
    int         fidelity_rounds = -1;
    std::string fidelity_etas;
    fidelity->add_option("--family", cfg.family, "gghz | w");
    fidelity->add_option("--rounds", fidelity_rounds, "rounds (default: 6 for gghz, 4 for w)");
    fidelity->add_option("--eta", cfg.eta, "degree of unsharpness");
    fidelity->add_option("--eta-grid", fidelity_etas, "sweep the all-(+1) branch over these eta values");
    fidelity->add_option("--threshold", cfg.threshold, "fidelity cut (default per family)");
    fidelity->add_flag("--weighted", cfg.weighted, "probability-weighted fractions");

    auto*       table1   = app.add_subcommand("table1", "N-qubit GHZ sequential LE table");
    std::string table1_n = "3..5";
    table1->add_option("--eta", cfg.eta, "degree of unsharpness");
    table1->add_option("--n", table1_n, "N range, e.g. 3..5");
    table1->add_option("--rounds", cfg.r_max, "number of rounds");
    table1->add_flag("--long", cfg.long_running, "enable the long-running streaming path (N >= 6)");

    auto*       fig    = app.add_subcommand("fig", "reproduce a numbered figure at desk scale");
    int         fig_no = 0;
    std::string fig_rounds, fig_etas, fig_c0s, fig_ggms, fig_n;
    fig->add_option("number", fig_no, "figure number")->required()->check(CLI::Range(3, 9));
    fig->add_option("--rounds", fig_rounds, "round range, e.g. 2..6 (or the cap for fig 5)");
    fig->add_option("--eta", cfg.eta, "degree of unsharpness");
    fig->add_option("--eta-grid", fig_etas, "eta grid as start:stop:step or comma list");
    fig->add_option("--c0-grid", fig_c0s, "gGHZ c0 grid (fig 4)");
    fig->add_option("--ggm-grid", fig_ggms, "GGM grid (fig 5)");
    fig->add_option("--epsilon", cfg.epsilon, "convergence window (fig 5/6)");
    fig->add_option("--samples", cfg.sample_size, "Haar samples per class (fig 6)");
    fig->add_option("--n", fig_n, "N range (figs 8, 9)");
    fig->add_option("--n1", cfg.n1, "Dicke excitation count (fig 9)");
    fig->add_flag("--normalized", cfg.normalized, "threshold on the gap relative to the sharp optimum (fig 5)");
    fig->add_flag("--long", cfg.long_running, "enable long-running sizes");

    auto*       sweep = app.add_subcommand("sweep", "run an experiment described by a JSON config");
    std::string config_path;
    bool        sweep_long = false;
    sweep->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sweep->add_flag("--long", sweep_long, "enable long-running sizes");

    for(CLI::App* sub : {le, sle, gle, fidelity, table1, fig, sweep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch(const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch(const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        if(serial) set_exec_mode(ExecMode::Serial);
        set_num_threads(resolve_threads(threads));
        cfg.seeded = app.count("--seed") > 0;
        cfg.space  = space_from_name(space_name);

        const bool has_cflag =
            not std::isnan(c0f) or not std::isnan(c1f) or not std::isnan(c2f) or not std::isnan(c3f);
        if(has_cflag) {
            if(cfg.family == "gghz") {
                if(std::isnan(c0f)) throw std::invalid_argument("gghz takes --c0 (and optionally --c1)");
                cfg.coeffs = {c0f};
                if(not std::isnan(c1f)) cfg.coeffs.push_back(c1f);
            } else if(cfg.family == "gw") {
                if(std::isnan(c1f) or std::isnan(c2f) or std::isnan(c3f))
                    throw std::invalid_argument("gw takes --c1, --c2 and --c3");
                cfg.coeffs = {c1f, c2f, c3f};
            } else {
                throw std::invalid_argument("--c0..--c3 apply to the gghz and gw families");
            }
        } else if(not coeff_list.empty()) {
            cfg.coeffs = coeff_list;
        }

        if(le->parsed()) {
            cfg.experiment = ExperimentTag::CUSTOM;
            validate_config(cfg);
            const PureState  state = config_state(cfg);
            const int        nb    = state.num_qubits - 2;
            std::vector<int> assisting;
            for(int q = 2; q < state.num_qubits; ++q) assisting.push_back(q);
            const SingleRoundResult res = single_round_le(state, {0, 1}, assisting, std::vector<double>(nb, cfg.eta),
                                                          SearchSpace{cfg.space, std::nullopt});
            ResultRow row;
            row.add("schema_version", result_schema_version);
            row.add("seed", static_cast<long long>(cfg.seed));
            row.add("family", cfg.family);
            row.add("n", state.num_qubits);
            row.add("eta", cfg.eta);
            row.add("space", space_name);
            row.add("value", res.value);
            row.add("dirs", direction_text(res.dirs));
            write_output(cfg, ExperimentTag::CUSTOM, "le", {row}, false);
        } else if(sle->parsed()) {
            cfg.experiment = ExperimentTag::CUSTOM;
            validate_config(cfg);
            write_output(cfg, ExperimentTag::CUSTOM, "sle", run_custom(cfg));
        } else if(gle->parsed()) {
            cfg.experiment = ExperimentTag::CUSTOM;
            validate_config(cfg);
            const PureState  state = config_state(cfg);
            std::vector<int> assisting;
            for(int q = 2; q < state.num_qubits; ++q) assisting.push_back(q);
            const int       nb  = state.num_qubits - 2;
            const GleResult res = global_le(state, {0, 1}, assisting, constant_um(nb, cfg.r_max, cfg.eta), cfg.r_max);
            ResultRow row;
            row.add("schema_version", result_schema_version);
            row.add("seed", static_cast<long long>(cfg.seed));
            row.add("family", cfg.family);
            row.add("n", state.num_qubits);
            row.add("eta", cfg.eta);
            row.add("R", cfg.r_max);
            row.add("value", res.value);
            std::string mm_text;
            for(int r = 0; r < res.mm.rounds; ++r) mm_text += (r ? ";" : "") + direction_text(res.mm.column(r));
            row.add("mm", mm_text);
            write_output(cfg, ExperimentTag::CUSTOM, "gle", {row}, false);
        } else if(fidelity->parsed()) {
            cfg.experiment = ExperimentTag::FIDELITY_SWEEP;
            cfg.r_max      = fidelity_rounds > 0 ? fidelity_rounds : (cfg.family == "w" ? 4 : 6);
            if(not fidelity_etas.empty()) cfg.eta_grid = parse_grid(fidelity_etas);
            validate_config(cfg);
            write_output(cfg, ExperimentTag::FIDELITY_SWEEP, "fidelity", run_fidelity_sweep(cfg));
        } else if(table1->parsed()) {
            cfg.experiment               = ExperimentTag::TABLE1;
            std::tie(cfg.n_lo, cfg.n_hi) = parse_int_range(table1_n);
            validate_config(cfg);
            write_output(cfg, ExperimentTag::TABLE1, "table1", run_table1(cfg));
        } else if(fig->parsed()) {
            std::vector<ResultRow> rows;
            switch(fig_no) {
                case 3:
                    cfg.experiment = ExperimentTag::F_R_CURVE;
                    if(not fig_rounds.empty()) std::tie(cfg.r_lo, cfg.r_max) = parse_int_range(fig_rounds);
                    if(not fig_etas.empty()) cfg.eta_grid = parse_grid(fig_etas);
                    break;
                case 4:
                    cfg.experiment = ExperimentTag::DELTA_SWEEP;
                    if(not fig_rounds.empty()) std::tie(cfg.r_lo, cfg.r_max) = parse_int_range(fig_rounds);
                    if(not fig_c0s.empty()) cfg.c0_grid = parse_grid(fig_c0s);
                    break;
                case 5:
                    cfg.experiment = ExperimentTag::ROUNDS_VS_GGM;
                    cfg.r_max      = 10;
                    if(not fig_rounds.empty()) cfg.r_max = parse_int_range(fig_rounds).second;
                    if(not fig_ggms.empty()) cfg.ggm_grid = parse_grid(fig_ggms);
                    break;
                case 6: cfg.experiment = ExperimentTag::CLASS_FRACTION; break;
                case 7:
                    cfg.experiment = ExperimentTag::FIDELITY_SWEEP;
                    cfg.eta_grid   = fig_etas.empty() ? parse_grid("0.05:1.0:0.05") : parse_grid(fig_etas);
                    break;
                case 8:
                case 9:
                    cfg.experiment = ExperimentTag::SLE_CURVE;
                    if(not fig_rounds.empty()) std::tie(cfg.r_lo, cfg.r_max) = parse_int_range(fig_rounds);
                    break;
                default: throw std::invalid_argument("fig: unsupported figure number");
            }
            if(fig_no == 6) {
                cfg.space  = SpaceKind::PAULI;
                cfg.family = "ghz_class";
                cfg.r_max  = 6;
                validate_config(cfg);
                rows       = run_class_fraction(cfg);
                cfg.family = "w_class";
                cfg.r_max  = 4;
                const std::vector<ResultRow> w_rows = run_class_fraction(cfg);
                rows.insert(rows.end(), w_rows.begin(), w_rows.end());
            } else if(fig_no == 7) {
                cfg.family = "gghz";
                cfg.r_max  = 6;
                validate_config(cfg);
                rows       = run_fidelity_sweep(cfg);
                cfg.family = "w";
                cfg.r_max  = 4;
                const std::vector<ResultRow> w_rows = run_fidelity_sweep(cfg);
                rows.insert(rows.end(), w_rows.begin(), w_rows.end());
            } else if(fig_no == 8 or fig_no == 9) {
                cfg.family = (fig_no == 8) ? "gghz" : "dicke";
                std::tie(cfg.n_lo, cfg.n_hi) = fig_n.empty()
                                                   ? std::pair<int, int>{fig_no == 8 ? 3 : 4, fig_no == 8 ? 5 : 6}
                                                   : parse_int_range(fig_n);
                validate_config(cfg);
                rows = run_sle_curve(cfg);
            } else {
                validate_config(cfg);
                rows = run_experiment(cfg);
            }
            write_output(cfg, cfg.experiment, "fig" + std::to_string(fig_no), rows);
        } else if(sweep->parsed()) {
            std::ifstream     f(config_path, std::ios::binary);
            std::stringstream buf;
            buf << f.rdbuf();
            ExperimentConfig file_cfg = parse_config(buf.str());
            // explicit command-line globals win over the config file
            if(app.count("--seed")) {
                file_cfg.seed   = cfg.seed;
                file_cfg.seeded = true;
            }
            if(app.count("--out")) file_cfg.out_dir = cfg.out_dir;
            if(app.count("--format")) file_cfg.format = cfg.format;
            if(app.count("--svg")) file_cfg.svg = cfg.svg;
            if(sweep_long) file_cfg.long_running = true;
            validate_config(file_cfg);
            write_output(file_cfg, file_cfg.experiment, experiment_name(file_cfg.experiment), run_experiment(file_cfg));
        }
        return 0;
    } catch(const BudgetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch(const std::bad_alloc&) {
        std::cerr << "error: memory budget exceeded\n";
        return 3;
    } catch(const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}
