#pragma once

#include <cmath>
#include <vector>

#include "pdcphase/half_int.hpp"

namespace pdcphase {

/// Source settings: effective interaction time tau = kappa*t and the pump
/// phase, which is threaded through but never changes a reported quantity.
struct PdcParams {
    double tau = 0.0;
    double pump_phase = 0.0;

    double lambda() const { return std::tanh(tau); }
};

/// Normalized mixture weights w_j = (2j+1) tanh^{4j}(tau) / cosh^4(tau) over
/// the spin-j singlet components, truncated at 2j <= max_twice_j.
struct PdcWeights {
    double tau = 0.0;
    int max_twice_j = 0;
    std::vector<double> weights;  // index n = 2j
    double tail = 0.0;            // exact mass above the truncation

    double weight(HalfInt j) const {
        if (j.twice < 0 || j.twice > max_twice_j) return 0.0;
        return weights[static_cast<size_t>(j.twice)];
    }
};

struct FluxMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Exact geometric-series mass above 2j = max_twice_j.
double weight_tail(const PdcParams& params, int max_twice_j);

/// Smallest cutoff 2j whose tail is below tail_tol.
int default_weight_cutoff(const PdcParams& params, double tail_tol = 1e-12);

PdcWeights singlet_weights(const PdcParams& params, int max_twice_j);

/// <N> = 4 sinh^2 tau and Delta^2 N = cosh 4tau - 1 of the source flux.
FluxMoments flux_moments(const PdcParams& params);

/// Ensemble-averaged lossless quantum Fisher information
/// <N^2>/12 + <N>/3 with <N^2> = Delta^2 N + <N>^2.
double ensemble_qfi_lossless(const PdcParams& params);

}  // namespace pdcphase
