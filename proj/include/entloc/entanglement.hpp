#pragma once
// Entanglement and fidelity functionals: negativity of a two-qubit state,
// GGM of a pure multiqubit state, and maximal Bell fidelity under local
// unitaries (multi-start Nelder-Mead over 6 Euler angles).

#include "entloc/qcore.hpp"

#include <functional>

namespace entloc {

enum class MeasureTag { NEGATIVITY, GGM, BELL_FIDELITY };

// sum of |negative eigenvalues| of the partial transpose; 1/2 for Bell states
double negativity(const Density2Q& dm);

// 1 - max over all bipartitions of the largest Schmidt eigenvalue
double ggm(const PureState& s);

// max_{U1,U2} <psi| (U1 (x) U2)^H dm (U1 (x) U2) |psi> with |psi> = (|00>+|11>)/sqrt(2);
// never below the identity start, deterministic across calls
double bell_fidelity(const Density2Q& dm);

// functional handle for average_entanglement; the GGM handle assumes a pure
// pair state (1 - largest eigenvalue of the single-qubit reduction)
std::function<double(const Density2Q&)> entanglement_functional(MeasureTag tag);

}
