#pragma once

// Independent reference implementations used only by the test suite. These
// deliberately take the slow, direct route (factorial sums in extended
// precision, exact rationals, finite differences, Monte Carlo averaging) so
// they share no code path with the library implementations they check.

#include <Eigen/Dense>
#include <cstdint>

#include "pdcphase/fock_sim.hpp"
#include "pdcphase/half_int.hpp"
#include "pdcphase/loss_model.hpp"
#include "pdcphase/pdc_source.hpp"

namespace oracles {

/// Explicit Wigner summation formula evaluated with 50-digit floats and
/// exact factorials.
Eigen::MatrixXd wigner_d_sum(pdcphase::HalfInt j, double phi);

/// Racah's closed-form Clebsch-Gordan sum in exact rational arithmetic.
double clebsch_gordan_racah(pdcphase::HalfInt j1, pdcphase::HalfInt j2, pdcphase::HalfInt m1,
                            pdcphase::HalfInt m2, pdcphase::HalfInt J, pdcphase::HalfInt M);

/// Central-difference classical Fisher information of the singlet outcome
/// distribution.
double fd_classical_fisher(pdcphase::HalfInt j, double phi, double step = 1e-5);

/// Probabilities of the J_za x J_zb measurement on the rotated conditional
/// state, built directly from the d-matrix (no commutator machinery).
Eigen::VectorXd conditional_outcome_probs(const pdcphase::SubspaceDensity& density, double phi);

/// Central-difference classical Fisher information of a conditional state.
double fd_conditional_cfi(const pdcphase::SubspaceDensity& density, double phi,
                          double step = 1e-5);

/// Joint detected-count distribution by binomial thinning of the truncated
/// singlet weights.
Eigen::MatrixXd thinning_joint(const pdcphase::PdcParams& pdc, double eta, int cutoff, int max_n);

/// Effective squeezing/thermal parameters from a 2x2 covariance-matrix
/// propagation V -> eta V + (1 - eta) I and symplectic diagonalization.
pdcphase::LossyGaussianParams covariance_effective_params(double tau, double eta);

/// Average of U^{(ja)} (x) U^{(jb)} conjugations of rho over Haar-random
/// SU(2) elements.
Eigen::MatrixXcd haar_twirl(const pdcphase::SubspaceDensity& density, int samples, uint64_t seed);

}  // namespace oracles
