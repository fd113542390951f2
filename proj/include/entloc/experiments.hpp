#pragma once
// Experiment drivers behind the CLI: the N-qubit GHZ table, class fractions,
// fidelity sweeps, rounds-vs-GGM pairing and the curve figures. Drivers return
// flat keyed rows; emitters turn them into CSV, JSON or polyline SVG.

#include "entloc/localize.hpp"
#include "entloc/states.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace entloc {

inline constexpr int result_schema_version = 1;

// a run that would blow the in-memory branch budget; the CLI maps this to its
// dedicated exit code
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentTag { TABLE1, F_R_CURVE, DELTA_SWEEP, ROUNDS_VS_GGM, CLASS_FRACTION, FIDELITY_SWEEP, SLE_CURVE, CUSTOM };

struct ExperimentConfig {
    ExperimentTag       experiment = ExperimentTag::TABLE1;
    std::string         family;           // gghz | gw | w | dicke | ghz_class | w_class
    int                 n  = 3;
    int                 n1 = -1;          // Dicke excitation count; -1 = floor(n/2)
    std::vector<double> coeffs;           // family coefficients (real)
    double              eta = 0.8;
    std::vector<double> eta_grid;         // explicit values; nonempty switches to a sweep
    std::vector<double> c0_grid;          // gGHZ coefficient grid (delta sweep)
    std::vector<double> ggm_grid;         // rounds-vs-GGM grid
    int                 r_lo        = 1;
    int                 r_max       = 6;
    int                 sample_size = 200;
    double              epsilon     = 5e-3;
    double              threshold   = -1.0; // fidelity cut; -1 = per-family default
    std::uint64_t       seed        = 0;
    bool                seeded      = false;
    SpaceKind           space       = SpaceKind::FULL_SPHERE;
    int                 n_lo = 3, n_hi = 5; // table / curve N range
    bool                long_running = false;
    bool                weighted     = false; // probability-weighted fidelity fractions
    bool                normalized   = false; // rounds_to_threshold on the relative gap
    bool                dedup        = false; // merge phase-equal branches between rounds
    std::string         out_dir;              // empty = stdout
    std::string         format = "csv";       // csv | json
    bool                svg    = false;
};

const char* experiment_name(ExperimentTag tag);
SpaceKind   space_from_name(const std::string& s);

ExperimentConfig parse_config(const std::string& json_text);
void             validate_config(const ExperimentConfig& cfg);

// resolve family + coefficients into a concrete state (coefficients are
// normalized first, so CLI users may pass unnormalized values)
PureState config_state(const ExperimentConfig& cfg);

// one emitted record: ordered columns, reals formatted with 9 significant
// digits at insertion so CSV bytes are reproducible
struct ResultRow {
    struct Cell {
        enum class Kind { INT, REAL, TEXT };
        std::string key;
        std::string text;
        Kind        kind = Kind::TEXT;
        long long   i    = 0;
        double      d    = 0.0;
    };
    std::vector<Cell> cells;

    void add(const std::string& key, const std::string& v);
    void add(const std::string& key, const char* v) { add(key, std::string(v)); }
    void add(const std::string& key, double v);
    void add(const std::string& key, long long v);
    void add(const std::string& key, int v) { add(key, static_cast<long long>(v)); }
    void add(const std::string& key, std::size_t v) { add(key, static_cast<long long>(v)); }
};

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows);

// minimal polyline chart; series = (label, (x, y) points)
using SvgSeries = std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>;
std::string to_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                   const SvgSeries& series);
SvgSeries   svg_series(ExperimentTag tag, const std::vector<ResultRow>& rows);

std::vector<ResultRow> run_table1(const ExperimentConfig& cfg);
std::vector<ResultRow> run_class_fraction(const ExperimentConfig& cfg);
std::vector<ResultRow> run_fidelity_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_rounds_vs_ggm(const ExperimentConfig& cfg);
std::vector<ResultRow> run_sle_curve(const ExperimentConfig& cfg);
std::vector<ResultRow> run_delta_sweep(const ExperimentConfig& cfg); // F_R_CURVE and DELTA_SWEEP
std::vector<ResultRow> run_custom(const ExperimentConfig& cfg);      // per-round records incl. directions
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

int cli_main(int argc, char** argv);

}
