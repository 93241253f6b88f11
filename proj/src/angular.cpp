#include "pdcphase/angular.hpp"

#include <gsl/gsl_sf_coupling.h>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace pdcphase {

HalfInt parse_half_int(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty half-integer");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        int num = std::stoi(text.substr(0, slash));
        int den = std::stoi(text.substr(slash + 1));
        if (den != 2) throw std::invalid_argument("half-integer denominator must be 2: " + text);
        return HalfInt{num};
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string frac = text.substr(dot + 1);
        int whole = std::stoi(text.substr(0, dot));
        bool neg = text[0] == '-';
        if (frac == "5") return HalfInt{2 * whole + (neg ? -1 : 1)};
        if (frac == "0" || frac.empty()) return HalfInt{2 * whole};
        throw std::invalid_argument("not a half-integer: " + text);
    }
    return HalfInt{2 * std::stoi(text)};
}

double ladder_coeff(HalfInt j, HalfInt m, int sign) {
    if (j.twice < 0) throw std::invalid_argument("ladder_coeff: j must be >= 0");
    if (!valid_projection(j, m)) throw std::invalid_argument("ladder_coeff: |m| must be <= j with matching parity");
    if (sign != +1 && sign != -1) throw std::invalid_argument("ladder_coeff: sign must be +1 or -1");
    // j(j+1) - m(m±1) in quarter units: (2j(2j+2) - 2m(2m±2)) / 4
    int num = j.twice * (j.twice + 2) - m.twice * (m.twice + 2 * sign);
    if (num <= 0) return 0.0;  // off the edge of the ladder
    return 0.5 * std::sqrt(static_cast<double>(num));
}

Eigen::MatrixXcd spin_jy(HalfInt j) {
    const int n = j.twice + 1;
    Eigen::MatrixXcd jy = Eigen::MatrixXcd::Zero(n, n);
    const std::complex<double> ihalf(0.0, 0.5);
    for (int col = 0; col < n; ++col) {
        HalfInt m{j.twice - 2 * col};
        // <m+1|J_y|m> = -i/2 N_+(m), <m-1|J_y|m> = +i/2 N_-(m)
        if (col > 0) jy(col - 1, col) = -ihalf * ladder_coeff(j, m, +1);
        if (col + 1 < n) jy(col + 1, col) = ihalf * ladder_coeff(j, m, -1);
    }
    return jy;
}

DMatrix wigner_d(HalfInt j, double phi) {
    if (j.twice < 0) throw std::invalid_argument("wigner_d: j must be >= 0");
    if (!std::isfinite(phi)) throw std::invalid_argument("wigner_d: phi must be finite");
    const int n = j.twice + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(spin_jy(j));
    Eigen::VectorXcd phases(n);
    for (int k = 0; k < n; ++k) {
        phases(k) = std::exp(std::complex<double>(0.0, -phi * es.eigenvalues()(k)));
    }
    Eigen::MatrixXcd d = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    DMatrix out{j, phi, d.real()};
    return out;
}

Eigen::MatrixXd wigner_d_derivative(const DMatrix& d) {
    const int n = d.dim();
    Eigen::MatrixXd deriv = Eigen::MatrixXd::Zero(n, n);
    for (int col = 0; col < n; ++col) {
        HalfInt m = d.m_at(col);
        double nminus = ladder_coeff(d.j, m, -1);
        double nplus = ladder_coeff(d.j, m, +1);
        for (int row = 0; row < n; ++row) {
            double lo = col + 1 < n ? d.entries(row, col + 1) : 0.0;  // m-1 column
            double hi = col > 0 ? d.entries(row, col - 1) : 0.0;      // m+1 column
            deriv(row, col) = 0.5 * (nminus * lo - nplus * hi);
        }
    }
    return deriv;
}

double clebsch_gordan(HalfInt j1, HalfInt j2, HalfInt m1, HalfInt m2, HalfInt J, HalfInt M) {
    if (j1.twice < 0 || j2.twice < 0 || J.twice < 0)
        throw std::invalid_argument("clebsch_gordan: spins must be >= 0");
    if (M.twice != m1.twice + m2.twice) return 0.0;
    if (J.twice > j1.twice + j2.twice || J.twice < std::abs(j1.twice - j2.twice)) return 0.0;
    if (!valid_projection(j1, m1) || !valid_projection(j2, m2) || !valid_projection(J, M)) return 0.0;
    // <j1 m1 j2 m2|J M> = (-1)^(j1-j2+M) sqrt(2J+1) (j1 j2 J; m1 m2 -M)
    double threej = gsl_sf_coupling_3j(j1.twice, j2.twice, J.twice, m1.twice, m2.twice, -M.twice);
    int phase_twice = j1.twice - j2.twice + M.twice;
    double sign = (phase_twice / 2) % 2 == 0 ? 1.0 : -1.0;
    return sign * std::sqrt(static_cast<double>(J.twice + 1)) * threej;
}

std::vector<std::pair<HalfInt, HalfInt>> coupled_basis_labels(HalfInt j1, HalfInt j2) {
    std::vector<std::pair<HalfInt, HalfInt>> labels;
    for (int tJ = j1.twice + j2.twice; tJ >= std::abs(j1.twice - j2.twice); tJ -= 2) {
        for (int tM = tJ; tM >= -tJ; tM -= 2) {
            labels.emplace_back(HalfInt{tJ}, HalfInt{tM});
        }
    }
    return labels;
}

Eigen::MatrixXd coupled_basis_matrix(HalfInt j1, HalfInt j2) {
    const int n1 = j1.twice + 1;
    const int n2 = j2.twice + 1;
    auto labels = coupled_basis_labels(j1, j2);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n1 * n2, static_cast<int>(labels.size()));
    for (int col = 0; col < static_cast<int>(labels.size()); ++col) {
        auto [J, M] = labels[col];
        for (int i1 = 0; i1 < n1; ++i1) {
            HalfInt m1{j1.twice - 2 * i1};
            HalfInt m2 = M - m1;
            if (std::abs(m2.twice) > j2.twice) continue;
            int i2 = (j2.twice - m2.twice) / 2;
            w(i1 * n2 + i2, col) = clebsch_gordan(j1, j2, m1, m2, J, M);
        }
    }
    return w;
}

}  // namespace pdcphase
