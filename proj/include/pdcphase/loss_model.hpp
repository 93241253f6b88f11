#pragma once

#include "pdcphase/pdc_source.hpp"

namespace pdcphase {

/// Per-mode transmission; the same eta acts on all four optic modes.
struct LossParams {
    double eta = 1.0;
};

/// Gaussian reduction of one lossy squeezed-vacuum mode: squeezing tau_eff
/// applied to a thermal state of intensity n_bar.
struct LossyGaussianParams {
    double tau_eff = 0.0;
    double n_bar = 0.0;
    double chi = 0.0;
    double p_aux = 1.0;  // eta e^{2 tau} + 1 - eta
    double m_aux = 1.0;  // eta e^{-2 tau} + 1 - eta
};

struct QfiBounds {
    double upper = 0.0;
    double lower = 0.0;
};

LossyGaussianParams effective_params(const PdcParams& pdc, const LossParams& loss);

/// Same reduction parameterized by (detected flux, eta).
LossyGaussianParams effective_params_from_flux(double flux, double eta);

/// Detected flux <N> = 4 eta sinh^2 tau.
double detected_flux(const PdcParams& pdc, const LossParams& loss);

/// Inverse of detected_flux at fixed eta.
double tau_from_flux(double flux, double eta);

/// Ensemble quantum Fisher information of the lossy source. Both closed
/// forms (tau_eff/n_bar and flux) are evaluated and cross-checked.
double lossy_qfi(const PdcParams& pdc, const LossParams& loss);

/// Same quantity parameterized by (detected flux, eta).
double lossy_qfi_from_flux(double flux, double eta);

/// eta = 1 and eta = 0 envelopes at fixed detected flux.
QfiBounds qfi_bounds(double flux);

/// Transmission above which the source beats coherent light of equal flux.
double coherent_crossover_eta(double flux);

/// gamma = d log<I_qu> / d log<N> at fixed eta; between 1 and 2 everywhere.
double scaling_exponent(double eta, double flux);

/// theta = (1 - eta) tanh tau, the single-parameter decoherence summary.
double decoherence_theta(const PdcParams& pdc, const LossParams& loss);

}  // namespace pdcphase
