#pragma once

#include <Eigen/Dense>

#include "pdcphase/half_int.hpp"

namespace pdcphase {

/// The spin-j two-party singlet probe, total spin zero by construction.
struct SingletProbe {
    HalfInt j;
};

/// Joint probabilities of the (2j+1)^2 spin-projection outcomes (A, B) after
/// the phase rotation, both indices descending from +j to -j.
struct OutcomeTable {
    HalfInt j;
    double phi = 0.0;
    Eigen::MatrixXd probs;

    int dim() const { return j.twice + 1; }
    int index_of(HalfInt m) const { return (j.twice - m.twice) / 2; }
    double at(HalfInt A, HalfInt B) const { return probs(index_of(A), index_of(B)); }
};

/// Maps any real phi onto the unambiguous estimation range [0, pi], using
/// P_AB(phi) = P_AB(-phi) and 2*pi periodicity.
double reduce_phase(double phi);

/// P_AB(phi) = d^j_{B,-A}(phi)^2 / (2j+1).
OutcomeTable outcome_distribution(HalfInt j, double phi);

/// Classical Fisher information of the outcome distribution, from the
/// analytic ladder-coefficient derivative of each probability. Equals
/// 4j(j+1)/3 for every phi.
double classical_fisher(HalfInt j, double phi);

/// Pure-state quantum Fisher information 4j(j+1)/3.
double quantum_fisher_pure(HalfInt j);

}  // namespace pdcphase
