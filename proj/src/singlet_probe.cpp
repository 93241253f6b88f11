#include "pdcphase/singlet_probe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdcphase/angular.hpp"

namespace pdcphase {

double reduce_phase(double phi) {
    if (!std::isfinite(phi)) throw std::invalid_argument("phase must be finite");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    phi = std::fmod(phi, two_pi);
    if (phi < 0.0) phi += two_pi;
    if (phi > std::numbers::pi) phi = two_pi - phi;  // mirror symmetry
    return phi;
}

OutcomeTable outcome_distribution(HalfInt j, double phi) {
    if (j.twice < 0) throw std::invalid_argument("outcome_distribution: j must be >= 0");
    const double phi_r = reduce_phase(phi);
    DMatrix d = wigner_d(j, phi_r);
    const int n = d.dim();
    Eigen::MatrixXd probs(n, n);
    const double norm = 1.0 / static_cast<double>(n);
    for (int ia = 0; ia < n; ++ia) {
        HalfInt a = d.m_at(ia);
        int col = d.index_of(-a);
        for (int ib = 0; ib < n; ++ib) {
            double amp = d.entries(ib, col);
            probs(ia, ib) = amp * amp * norm;
        }
    }
    return OutcomeTable{j, phi_r, probs};
}

double classical_fisher(HalfInt j, double phi) {
    if (j.twice < 0) throw std::invalid_argument("classical_fisher: j must be >= 0");
    const double phi_r = reduce_phase(phi);
    DMatrix d = wigner_d(j, phi_r);
    Eigen::MatrixXd dprime = wigner_d_derivative(d);
    const int n = d.dim();
    // Each outcome contributes (dP/dphi)^2 / P = 4 d'^2 / (2j+1); the ratio
    // extends continuously through zeros of P, so every outcome is summed.
    double info = 0.0;
    for (int ia = 0; ia < n; ++ia) {
        int col = (n - 1) - ia;  // column of m = -A
        for (int ib = 0; ib < n; ++ib) {
            double g = dprime(ib, col);
            info += 4.0 * g * g;
        }
    }
    return info / static_cast<double>(n);
}

double quantum_fisher_pure(HalfInt j) {
    if (j.twice < 0) throw std::invalid_argument("quantum_fisher_pure: j must be >= 0");
    // 4 j (j+1) / 3 with exact doubled-integer arithmetic
    return static_cast<double>(j.twice * (j.twice + 2)) / 3.0;
}

}  // namespace pdcphase
