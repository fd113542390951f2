#include "entloc/povm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace entloc {

Direction normalize_direction(double theta, double phi) {
    const double two_pi = 2.0 * pi;
    theta = std::fmod(theta, two_pi);
    if(theta < 0.0) theta += two_pi;
    if(theta > pi) { // (theta, phi) and (2pi - theta, phi + pi) are the same axis point
        theta = two_pi - theta;
        phi += pi;
    }
    phi = std::fmod(phi, two_pi);
    if(phi < 0.0) phi += two_pi;
    if(phi >= two_pi) phi = 0.0;
    return Direction{theta, phi};
}

bool same_direction(const Direction& a, const Direction& b, double tol) {
    return std::abs(a.theta - b.theta) <= tol and std::abs(a.phi - b.phi) <= tol;
}

namespace {
    void check_lambda_eta(int lambda, double eta, const char* who) {
        if(lambda != +1 and lambda != -1) throw std::invalid_argument(std::string(who) + ": outcome must be +1 or -1");
        if(not(eta >= 0.0 and eta <= 1.0)) throw std::invalid_argument(std::string(who) + ": eta out of [0,1]");
    }
}

Mat2 povm_element(int lambda, double eta, const Direction& dir) {
    check_lambda_eta(lambda, eta, "povm_element");
    const double le = lambda * eta;
    const double ct = std::cos(dir.theta);
    const double st = std::sin(dir.theta);
    const cplx   ep = std::polar(1.0, dir.phi);
    // (I + lambda eta n.sigma)/2 with n.sigma = [[cos t, sin t e^{-i p}], [sin t e^{i p}, -cos t]]
    return Mat2{0.5 * (1.0 + le * ct), 0.5 * le * st * std::conj(ep),
                0.5 * le * st * ep, 0.5 * (1.0 - le * ct)};
}

Mat2 basis_unitary(const Direction& dir) {
    const double c  = std::cos(dir.theta / 2.0);
    const double s  = std::sin(dir.theta / 2.0);
    const cplx   ep = std::polar(1.0, dir.phi);
    // columns are |chi+> = (c, e^{ip} s) and |chi-> = (s, -e^{ip} c)
    return Mat2{c, s, ep * s, -ep * c};
}

KrausOperator kraus_operator(int lambda, double eta, const Direction& dir) {
    check_lambda_eta(lambda, eta, "kraus_operator");
    const double wp = std::sqrt(0.5 * (1.0 + lambda * eta)); // weight on |chi+><chi+|
    const double wm = std::sqrt(0.5 * (1.0 - lambda * eta));
    const double c  = std::cos(dir.theta / 2.0);
    const double s  = std::sin(dir.theta / 2.0);
    const cplx   ep = std::polar(1.0, dir.phi);

    KrausOperator k;
    k.outcome   = lambda;
    k.eta       = eta;
    k.direction = dir;
    // wp |chi+><chi+| + wm |chi-><chi-| with |chi+> = (c, e^{ip} s), |chi-> = (s, -e^{ip} c)
    k.m[0] = wp * c * c + wm * s * s;
    k.m[1] = (wp - wm) * c * s * std::conj(ep);
    k.m[2] = (wp - wm) * c * s * ep;
    k.m[3] = wp * s * s + wm * c * c;
    return k;
}

std::vector<double> UnsharpnessMatrix::column(int r) const {
    std::vector<double> col(nb);
    for(int b = 0; b < nb; ++b) col[b] = at(b, r);
    return col;
}

std::vector<Direction> MeasurementMatrix::column(int r) const {
    std::vector<Direction> col(nb);
    for(int b = 0; b < nb; ++b) col[b] = at(b, r);
    return col;
}

UnsharpnessMatrix constant_um(int nb, int rounds, double eta) {
    if(not(eta >= 0.0 and eta <= 1.0)) throw std::invalid_argument("constant_um: eta out of [0,1]");
    UnsharpnessMatrix um;
    um.nb     = nb;
    um.rounds = rounds;
    um.entries.assign(static_cast<std::size_t>(nb) * rounds, eta);
    return um;
}

MeasurementPlan validate_plan(const UnsharpnessMatrix& um, const MeasurementMatrix& mm) {
    if(um.nb != mm.nb or um.rounds != mm.rounds)
        throw std::invalid_argument("validate_plan: unsharpness " + std::to_string(um.nb) + "x" + std::to_string(um.rounds) +
                                    " vs directions " + std::to_string(mm.nb) + "x" + std::to_string(mm.rounds));
    if(um.nb < 1 or um.rounds < 1) throw std::invalid_argument("validate_plan: empty plan");
    if(um.entries.size() != static_cast<std::size_t>(um.nb) * um.rounds or
       mm.entries.size() != static_cast<std::size_t>(mm.nb) * mm.rounds)
        throw std::invalid_argument("validate_plan: entry count does not match declared shape");
    for(double e : um.entries) {
        if(std::isnan(e)) throw std::invalid_argument("validate_plan: NaN unsharpness entry");
        if(not(e >= 0.0 and e <= 1.0)) throw std::invalid_argument("validate_plan: unsharpness entry out of [0,1]");
    }
    for(const Direction& d : mm.entries) {
        if(std::isnan(d.theta) or std::isnan(d.phi)) throw std::invalid_argument("validate_plan: NaN direction entry");
        if(d.theta < 0.0 or d.theta > pi or d.phi < 0.0 or d.phi >= 2.0 * pi)
            throw std::invalid_argument("validate_plan: direction angles outside canonical ranges");
    }
    return MeasurementPlan{um, mm};
}

}
