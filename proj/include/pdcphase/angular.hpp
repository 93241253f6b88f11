#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pdcphase/half_int.hpp"

namespace pdcphase {

/// Wigner small-d rotation matrix d^j_{m',m}(phi) about the y axis.
/// Rows and columns are indexed with m descending from +j to -j, the usual
/// physics layout, so entry (0,0) is d_{j,j}.
struct DMatrix {
    HalfInt j;
    double phi = 0.0;
    Eigen::MatrixXd entries;

    int dim() const { return j.twice + 1; }
    int index_of(HalfInt m) const { return (j.twice - m.twice) / 2; }
    HalfInt m_at(int idx) const { return HalfInt{j.twice - 2 * idx}; }
    double operator()(HalfInt mp, HalfInt m) const {
        return entries(index_of(mp), index_of(m));
    }
};

/// One Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M> in the
/// Condon-Shortley phase convention.
struct CgCoefficient {
    HalfInt j1, j2, m1, m2, J, M;
    double value = 0.0;
};

/// d^j(phi) computed from the eigensystem of the tridiagonal J_y matrix,
/// which stays well conditioned at large j where the factorial sum blows up.
DMatrix wigner_d(HalfInt j, double phi);

/// Analytic phi-derivative of d^j(phi), from the ladder-coefficient relation
/// d'_{m',m} = (N_-(m) d_{m',m-1} - N_+(m) d_{m',m+1}) / 2.
Eigen::MatrixXd wigner_d_derivative(const DMatrix& d);

/// N_{+/-}^{(j)}(m) = sqrt(j(j+1) - m(m +/- 1)); zero off the top/bottom rung.
double ladder_coeff(HalfInt j, HalfInt m, int sign);

/// <j1 m1 j2 m2 | J M>; zero whenever a selection rule fails.
double clebsch_gordan(HalfInt j1, HalfInt j2, HalfInt m1, HalfInt m2, HalfInt J, HalfInt M);

/// Labels of the coupled basis for j1 x j2, J descending from j1+j2,
/// M descending within each J block.
std::vector<std::pair<HalfInt, HalfInt>> coupled_basis_labels(HalfInt j1, HalfInt j2);

/// Orthogonal change of basis from the product basis (m1, m2) (row index
/// i1*(2*j2+1)+i2, m descending) to the coupled basis (J, M) columns ordered
/// as in coupled_basis_labels.
Eigen::MatrixXd coupled_basis_matrix(HalfInt j1, HalfInt j2);

/// Spin matrix J_y in the descending-m basis, built from ladder coefficients.
Eigen::MatrixXcd spin_jy(HalfInt j);

}  // namespace pdcphase
