#pragma once
// Unsharp two-outcome POVMs: elements P(lambda,eta) = (I + lambda eta n.sigma)/2,
// their Kraus square roots, and the N_B x R plan bookkeeping (unsharpness,
// direction and outcome matrices) for multi-round measurement schedules.

#include "entloc/qcore.hpp"

#include <cstdint>
#include <vector>

namespace entloc {

// spherical direction, theta in [0, pi], phi in [0, 2pi)
struct Direction {
    double theta = 0.0;
    double phi   = 0.0;
};

inline constexpr Direction dir_x{pi / 2.0, 0.0};
inline constexpr Direction dir_y{pi / 2.0, pi / 2.0};
inline constexpr Direction dir_z{0.0, 0.0};

// wrap angles back into the canonical ranges (antipodal pairs stay distinct)
Direction normalize_direction(double theta, double phi);

// true within 1e-9 in both angles
bool same_direction(const Direction& a, const Direction& b, double tol = 1e-9);

struct KrausOperator {
    Mat2      m{};
    int       outcome = +1;
    double    eta     = 1.0;
    Direction direction{};
};

Mat2          povm_element(int lambda, double eta, const Direction& dir);
KrausOperator kraus_operator(int lambda, double eta, const Direction& dir);

// unitary sending |0>,|1> to |chi+>,|chi-> of dir; conjugates the z-axis Kraus
// operators into those of dir
Mat2 basis_unitary(const Direction& dir);

// N_B x R matrices, row = assisting qubit, column = round
struct UnsharpnessMatrix {
    int                 nb = 0, rounds = 0;
    std::vector<double> entries; // row-major

    double& at(int b, int r) { return entries[static_cast<std::size_t>(b) * rounds + r]; }
    double  at(int b, int r) const { return entries[static_cast<std::size_t>(b) * rounds + r]; }
    std::vector<double> column(int r) const;
};

struct MeasurementMatrix {
    int                    nb = 0, rounds = 0;
    std::vector<Direction> entries; // row-major

    Direction& at(int b, int r) { return entries[static_cast<std::size_t>(b) * rounds + r]; }
    Direction  at(int b, int r) const { return entries[static_cast<std::size_t>(b) * rounds + r]; }
    std::vector<Direction> column(int r) const;
};

struct OutcomeMatrix {
    int                 nb = 0, rounds = 0;
    std::vector<int8_t> entries; // row-major, +1/-1
};

UnsharpnessMatrix constant_um(int nb, int rounds, double eta);

struct MeasurementPlan {
    UnsharpnessMatrix um;
    MeasurementMatrix mm;
};

// shape/NaN/range checks; throws std::invalid_argument on violation
MeasurementPlan validate_plan(const UnsharpnessMatrix& um, const MeasurementMatrix& mm);

}
