#pragma once
// Dense complex linear algebra for small N-qubit registers: single-qubit
// operator application, pair partial trace, partial transpose and a cyclic
// Jacobi eigensolver for the small Hermitian matrices those produce.
//
// Convention used everywhere: qubit 0 is the MOST significant bit of the
// amplitude index, so |100> of a 3-qubit register sits at index 4.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace entloc {

using cplx = std::complex<double>;

inline constexpr double pi       = 3.14159265358979323846;
inline constexpr double eps_prob = 1e-12; // branches below this mass are impossible

// row-major fixed-size complex matrices
using Mat2 = std::array<cplx, 4>;
using Mat4 = std::array<cplx, 16>;

// 4x4 density matrix of a kept qubit pair, basis ordered q1 (x) q2
using Density2Q = Mat4;

struct PureState {
    int               num_qubits = 0;
    std::vector<cplx> amp;

    PureState() = default;
    PureState(int n, std::vector<cplx> a) : num_qubits(n), amp(std::move(a)) {}
};

// side_a plus its implied complement; side_a must be a nonempty proper subset
struct Bipartition {
    std::vector<int> side_a;
};

inline std::size_t state_dim(const PureState& s) { return std::size_t{1} << s.num_qubits; }

inline std::size_t qubit_stride(int qubit, int num_qubits) {
    return std::size_t{1} << (num_qubits - 1 - qubit);
}
inline int qubit_bit(std::size_t index, int qubit, int num_qubits) {
    return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1u);
}

PureState basis_state(int num_qubits, std::size_t index);

PureState apply_single_qubit_op(const PureState& s, int qubit, const Mat2& op);
void      apply_single_qubit_op_inplace(PureState& s, int qubit, const Mat2& op);

double    norm_squared(const PureState& s);
PureState normalize(const PureState& s); // throws on norm^2 <= eps_prob
cplx      inner_product(const PureState& a, const PureState& b); // <a|b>

Density2Q reduced_density(const PureState& s, int q1, int q2);

// transpose the first tensor factor; an involution
Mat4 partial_transpose(const Density2Q& dm);

// ascending eigenvalues of a 4x4 Hermitian matrix (Hermiticity checked to 1e-9)
std::array<double, 4> hermitian_eigenvalues(const Mat4& m);

// general small Hermitian eigensolver (cyclic Jacobi, off-diagonal Frobenius
// norm < 1e-12); ascending eigenvalues, optional eigenvectors as columns of *vecs
std::vector<double> hermitian_eigs(std::vector<cplx> m, int n, std::vector<cplx>* vecs = nullptr);

// as above but skips the Hermiticity guard; used in hot loops on matrices
// that are Hermitian by construction
std::array<double, 4> hermitian_eigenvalues_unchecked(const Mat4& m);

// allocation-free cyclic Jacobi for the 4x4 hot path; unsorted eigenvalues
std::array<double, 4> jacobi4_eigenvalues(Mat4 m);

// eigenvalues of the reduced density matrix of the smaller side of the cut
std::vector<double> schmidt_spectrum(const PureState& s, const Bipartition& cut);

}
