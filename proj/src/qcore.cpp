#include "entloc/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace entloc {

PureState basis_state(int num_qubits, std::size_t index) {
    if(num_qubits < 1) throw std::invalid_argument("basis_state: need at least one qubit");
    std::size_t dim = std::size_t{1} << num_qubits;
    if(index >= dim) throw std::invalid_argument("basis_state: index out of range");
    PureState s;
    s.num_qubits = num_qubits;
    s.amp.assign(dim, cplx{0.0, 0.0});
    s.amp[index] = 1.0;
    return s;
}

void apply_single_qubit_op_inplace(PureState& s, int qubit, const Mat2& op) {
    if(qubit < 0 or qubit >= s.num_qubits)
        throw std::invalid_argument("apply_single_qubit_op: qubit " + std::to_string(qubit) + " out of range");
    const std::size_t dim    = state_dim(s);
    const std::size_t stride = qubit_stride(qubit, s.num_qubits);
    for(std::size_t base = 0; base < dim; base += 2 * stride) {
        for(std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            const std::size_t i1 = i0 + stride;
            const cplx        a0 = s.amp[i0];
            const cplx        a1 = s.amp[i1];
            s.amp[i0] = op[0] * a0 + op[1] * a1;
            s.amp[i1] = op[2] * a0 + op[3] * a1;
        }
    }
}

PureState apply_single_qubit_op(const PureState& s, int qubit, const Mat2& op) {
    PureState out = s;
    apply_single_qubit_op_inplace(out, qubit, op);
    return out;
}

double norm_squared(const PureState& s) {
    double n2 = 0.0;
    for(const auto& a : s.amp) n2 += std::norm(a);
    return n2;
}

PureState normalize(const PureState& s) {
    double n2 = norm_squared(s);
    if(n2 <= eps_prob) throw std::runtime_error("normalize: degenerate branch, norm^2 <= 1e-12");
    PureState    out   = s;
    const double scale = 1.0 / std::sqrt(n2);
    for(auto& a : out.amp) a *= scale;
    return out;
}

cplx inner_product(const PureState& a, const PureState& b) {
    if(a.num_qubits != b.num_qubits) throw std::invalid_argument("inner_product: qubit count mismatch");
    cplx acc{0.0, 0.0};
    for(std::size_t i = 0; i < a.amp.size(); ++i) acc += std::conj(a.amp[i]) * b.amp[i];
    return acc;
}

Density2Q reduced_density(const PureState& s, int q1, int q2) {
    if(q1 == q2) throw std::invalid_argument("reduced_density: pair indices collide");
    if(q1 < 0 or q2 < 0 or q1 >= s.num_qubits or q2 >= s.num_qubits)
        throw std::invalid_argument("reduced_density: pair index out of range");
    const std::size_t dim = state_dim(s);
    const std::size_t s1  = qubit_stride(q1, s.num_qubits);
    const std::size_t s2  = qubit_stride(q2, s.num_qubits);

    Density2Q rho{};
    if(s.num_qubits == 2) {
        // no environment to trace out: plain projector in (q1 (x) q2) order
        for(int a = 0; a < 4; ++a) {
            std::size_t ia = ((a >> 1) ? s1 : 0) + ((a & 1) ? s2 : 0);
            for(int b = 0; b < 4; ++b) {
                std::size_t ib = ((b >> 1) ? s1 : 0) + ((b & 1) ? s2 : 0);
                rho[a * 4 + b] = s.amp[ia] * std::conj(s.amp[ib]);
            }
        }
        return rho;
    }

    const std::size_t mask = s1 | s2;
    for(std::size_t rest = 0; rest < dim; ++rest) {
        if(rest & mask) continue; // enumerate environment patterns once
        cplx psi[4];
        for(int a = 0; a < 4; ++a) psi[a] = s.amp[rest + ((a >> 1) ? s1 : 0) + ((a & 1) ? s2 : 0)];
        for(int a = 0; a < 4; ++a)
            for(int b = 0; b < 4; ++b) rho[a * 4 + b] += psi[a] * std::conj(psi[b]);
    }
    return rho;
}

Mat4 partial_transpose(const Density2Q& dm) {
    Mat4 out{};
    for(int a1 = 0; a1 < 2; ++a1)
        for(int a2 = 0; a2 < 2; ++a2)
            for(int b1 = 0; b1 < 2; ++b1)
                for(int b2 = 0; b2 < 2; ++b2)
                    out[(b1 * 2 + a2) * 4 + (a1 * 2 + b2)] = dm[(a1 * 2 + a2) * 4 + (b1 * 2 + b2)];
    return out;
}

namespace {

    double off_diagonal_frobenius(const std::vector<cplx>& m, int n) {
        double acc = 0.0;
        for(int i = 0; i < n; ++i)
            for(int j = 0; j < n; ++j)
                if(i != j) acc += std::norm(m[i * n + j]);
        return std::sqrt(acc);
    }

    // one cyclic sweep of complex Jacobi rotations, A <- J^H A J (and V <- V J)
    void jacobi_sweep(std::vector<cplx>& a, int n, std::vector<cplx>* v) {
        for(int p = 0; p < n - 1; ++p) {
            for(int q = p + 1; q < n; ++q) {
                const double r = std::abs(a[p * n + q]);
                if(r < 1e-200) {
                    a[p * n + q] = a[q * n + p] = 0.0;
                    continue;
                }
                const cplx   phase = a[p * n + q] / r; // e^{i phi}
                const double alpha = a[p * n + p].real();
                const double beta  = a[q * n + q].real();
                const double tau   = (beta - alpha) / (2.0 * r);
                const double t     = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c     = 1.0 / std::sqrt(1.0 + t * t);
                const double sn    = t * c;

                const cplx jpq = sn * phase;             // J_pq
                const cplx jqp = -sn * std::conj(phase); // J_qp = -sn e^{-i phi}

                for(int i = 0; i < n; ++i) {        // columns: A <- A J
                    const cplx aip = a[i * n + p];
                    const cplx aiq = a[i * n + q];
                    a[i * n + p]   = aip * c + aiq * jqp;
                    a[i * n + q]   = aip * jpq + aiq * c;
                }
                for(int j = 0; j < n; ++j) {        // rows: A <- J^H A
                    const cplx apj = a[p * n + j];
                    const cplx aqj = a[q * n + j];
                    a[p * n + j]   = apj * c + aqj * std::conj(jqp);
                    a[q * n + j]   = apj * std::conj(jpq) + aqj * c;
                }
                a[p * n + q] = a[q * n + p] = 0.0;
                a[p * n + p] = a[p * n + p].real();
                a[q * n + q] = a[q * n + q].real();

                if(v != nullptr) {
                    for(int i = 0; i < n; ++i) {
                        const cplx vip = (*v)[i * n + p];
                        const cplx viq = (*v)[i * n + q];
                        (*v)[i * n + p] = vip * c + viq * jqp;
                        (*v)[i * n + q] = vip * jpq + viq * c;
                    }
                }
            }
        }
    }

}

std::vector<double> hermitian_eigs(std::vector<cplx> m, int n, std::vector<cplx>* vecs) {
    if(n < 1 or static_cast<int>(m.size()) != n * n) throw std::invalid_argument("hermitian_eigs: bad dimensions");
    // symmetrize so the iteration sees an exactly Hermitian matrix
    for(int i = 0; i < n; ++i) {
        m[i * n + i] = m[i * n + i].real();
        for(int j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (m[i * n + j] + std::conj(m[j * n + i]));
            m[i * n + j]   = avg;
            m[j * n + i]   = std::conj(avg);
        }
    }
    if(vecs != nullptr) {
        vecs->assign(static_cast<std::size_t>(n) * n, cplx{0.0, 0.0});
        for(int i = 0; i < n; ++i) (*vecs)[i * n + i] = 1.0;
    }
    for(int sweep = 0; sweep < 60; ++sweep) {
        if(off_diagonal_frobenius(m, n) < 1e-12) break;
        jacobi_sweep(m, n, vecs);
    }

    std::vector<double> eig(n);
    for(int i = 0; i < n; ++i) eig[i] = m[i * n + i].real();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return eig[i] < eig[j]; });

    std::vector<double> sorted(n);
    for(int i = 0; i < n; ++i) sorted[i] = eig[order[i]];
    if(vecs != nullptr) {
        std::vector<cplx> perm(vecs->size());
        for(int col = 0; col < n; ++col)
            for(int row = 0; row < n; ++row) perm[row * n + col] = (*vecs)[row * n + order[col]];
        *vecs = std::move(perm);
    }
    return sorted;
}

std::array<double, 4> hermitian_eigenvalues(const Mat4& m) {
    for(int i = 0; i < 4; ++i)
        for(int j = 0; j < 4; ++j)
            if(std::abs(m[i * 4 + j] - std::conj(m[j * 4 + i])) > 1e-9)
                throw std::invalid_argument("hermitian_eigenvalues: matrix not Hermitian within 1e-9");
    return hermitian_eigenvalues_unchecked(m);
}

std::array<double, 4> jacobi4_eigenvalues(Mat4 a) {
    for(int sweep = 0; sweep < 30; ++sweep) {
        double off2 = 0.0;
        for(int i = 0; i < 4; ++i)
            for(int j = i + 1; j < 4; ++j) off2 += std::norm(a[i * 4 + j]);
        if(off2 < 1e-26) break;
        for(int p = 0; p < 3; ++p) {
            for(int q = p + 1; q < 4; ++q) {
                const double r = std::abs(a[p * 4 + q]);
                if(r < 1e-200) {
                    a[p * 4 + q] = a[q * 4 + p] = 0.0;
                    continue;
                }
                const cplx   phase = a[p * 4 + q] / r;
                const double tau   = (a[q * 4 + q].real() - a[p * 4 + p].real()) / (2.0 * r);
                const double t     = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c     = 1.0 / std::sqrt(1.0 + t * t);
                const double sn    = t * c;
                const cplx   jpq   = sn * phase;
                const cplx   jqp   = -sn * std::conj(phase);
                for(int i = 0; i < 4; ++i) {
                    const cplx aip = a[i * 4 + p];
                    const cplx aiq = a[i * 4 + q];
                    a[i * 4 + p]   = aip * c + aiq * jqp;
                    a[i * 4 + q]   = aip * jpq + aiq * c;
                }
                for(int j = 0; j < 4; ++j) {
                    const cplx apj = a[p * 4 + j];
                    const cplx aqj = a[q * 4 + j];
                    a[p * 4 + j]   = apj * c + aqj * std::conj(jqp);
                    a[q * 4 + j]   = apj * std::conj(jpq) + aqj * c;
                }
                a[p * 4 + q] = a[q * 4 + p] = 0.0;
            }
        }
    }
    return {a[0].real(), a[5].real(), a[10].real(), a[15].real()};
}

std::array<double, 4> hermitian_eigenvalues_unchecked(const Mat4& m) {
    auto eig = jacobi4_eigenvalues(m);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> schmidt_spectrum(const PureState& s, const Bipartition& cut) {
    const int n = s.num_qubits;
    if(cut.side_a.empty()) throw std::invalid_argument("schmidt_spectrum: empty bipartition side");
    std::vector<bool> in_a(n, false);
    for(int q : cut.side_a) {
        if(q < 0 or q >= n) throw std::invalid_argument("schmidt_spectrum: qubit index out of range");
        if(in_a[q]) throw std::invalid_argument("schmidt_spectrum: duplicate qubit in bipartition");
        in_a[q] = true;
    }
    const int ka = static_cast<int>(cut.side_a.size());
    if(ka == n) throw std::invalid_argument("schmidt_spectrum: bipartition side must be a proper subset");

    // reduce over the smaller side; both sides share the nonzero spectrum
    const bool       use_a = (ka <= n - ka);
    std::vector<int> side;
    for(int q = 0; q < n; ++q)
        if(in_a[q] == use_a) side.push_back(q);
    const int k = static_cast<int>(side.size());

    const std::size_t dim_side = std::size_t{1} << k;
    const std::size_t dim_rest = state_dim(s) >> k;

    // gather amplitudes as a (side) x (rest) matrix, then rho = Psi Psi^H
    std::vector<cplx> psi(dim_side * dim_rest, cplx{0.0, 0.0});
    for(std::size_t i = 0; i < state_dim(s); ++i) {
        std::size_t a = 0, r = 0;
        int ja = 0, jr = 0;
        for(int q = 0; q < n; ++q) {
            const int bit = qubit_bit(i, q, n);
            if(in_a[q] == use_a) {
                a |= static_cast<std::size_t>(bit) << (k - 1 - ja);
                ++ja;
            } else {
                r |= static_cast<std::size_t>(bit) << (n - k - 1 - jr);
                ++jr;
            }
        }
        psi[a * dim_rest + r] = s.amp[i];
    }
    std::vector<cplx> rho(dim_side * dim_side, cplx{0.0, 0.0});
    for(std::size_t a = 0; a < dim_side; ++a)
        for(std::size_t b = 0; b <= a; ++b) {
            cplx acc{0.0, 0.0};
            for(std::size_t r = 0; r < dim_rest; ++r) acc += psi[a * dim_rest + r] * std::conj(psi[b * dim_rest + r]);
            rho[a * dim_side + b] = acc;
            rho[b * dim_side + a] = std::conj(acc);
        }

    std::vector<double> eig = hermitian_eigs(std::move(rho), static_cast<int>(dim_side), nullptr);
    std::reverse(eig.begin(), eig.end()); // descending
    for(auto& e : eig)
        if(e < 0.0 and e > -1e-12) e = 0.0;
    return eig;
}

}
