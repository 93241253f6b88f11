#include "pdcphase/loss_model.hpp"

#include <cmath>
#include <stdexcept>

namespace pdcphase {

namespace {
void check(const PdcParams& pdc, const LossParams& loss) {
    if (!(pdc.tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
    if (!(loss.eta >= 0.0 && loss.eta <= 1.0)) throw std::invalid_argument("eta must be in [0, 1]");
}
}  // namespace

LossyGaussianParams effective_params(const PdcParams& pdc, const LossParams& loss) {
    check(pdc, loss);
    LossyGaussianParams g;
    g.p_aux = loss.eta * std::exp(2.0 * pdc.tau) + 1.0 - loss.eta;
    g.m_aux = loss.eta * std::exp(-2.0 * pdc.tau) + 1.0 - loss.eta;
    g.tau_eff = 0.25 * std::log(g.p_aux / g.m_aux);
    g.n_bar = 0.5 * (std::sqrt(g.p_aux * g.m_aux) - 1.0);
    g.chi = g.n_bar / (1.0 + g.n_bar);
    return g;
}

LossyGaussianParams effective_params_from_flux(double flux, double eta) {
    return effective_params(PdcParams{tau_from_flux(flux, eta), 0.0}, LossParams{eta});
}

double detected_flux(const PdcParams& pdc, const LossParams& loss) {
    check(pdc, loss);
    const double s = std::sinh(pdc.tau);
    return 4.0 * loss.eta * s * s;
}

double tau_from_flux(double flux, double eta) {
    if (!(flux >= 0.0)) throw std::invalid_argument("flux must be >= 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in (0, 1] to invert the flux");
    return std::asinh(std::sqrt(0.25 * flux / eta));
}

double lossy_qfi_from_flux(double flux, double eta) {
    if (!(flux >= 0.0)) throw std::invalid_argument("flux must be >= 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in [0, 1]");
    return flux * (4.0 * eta + flux) / (8.0 + 4.0 * (1.0 - eta) * flux);
}

double lossy_qfi(const PdcParams& pdc, const LossParams& loss) {
    check(pdc, loss);
    const LossyGaussianParams g = effective_params(pdc, loss);
    const double s2 = std::sinh(2.0 * g.tau_eff);
    const double two_nb1 = 2.0 * g.n_bar + 1.0;
    const double gaussian_form =
        s2 * s2 * two_nb1 * two_nb1 / (2.0 * (1.0 + 2.0 * g.n_bar + 2.0 * g.n_bar * g.n_bar));
    const double flux_form = lossy_qfi_from_flux(detected_flux(pdc, loss), loss.eta);
    if (std::abs(gaussian_form - flux_form) > 1e-10 * std::max(1.0, std::abs(flux_form)))
        throw std::runtime_error("lossy_qfi: closed forms disagree beyond 1e-10");
    return flux_form;
}

QfiBounds qfi_bounds(double flux) {
    if (!(flux >= 0.0)) throw std::invalid_argument("flux must be >= 0");
    return QfiBounds{flux * (4.0 + flux) / 8.0, flux * flux / (8.0 + 4.0 * flux)};
}

double coherent_crossover_eta(double flux) {
    if (!(flux > 0.0)) throw std::invalid_argument("flux must be > 0");
    return 0.5 + 1.0 / (2.0 + flux);
}

double scaling_exponent(double eta, double flux) {
    if (!(flux > 0.0)) throw std::invalid_argument("flux must be > 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in (0, 1]");
    // gamma = 1 + N/(4 eta + N) - 4 (1-eta) N / (8 + 4 (1-eta) N)
    return 1.0 + flux / (4.0 * eta + flux) -
           4.0 * (1.0 - eta) * flux / (8.0 + 4.0 * (1.0 - eta) * flux);
}

double decoherence_theta(const PdcParams& pdc, const LossParams& loss) {
    check(pdc, loss);
    return (1.0 - loss.eta) * std::tanh(pdc.tau);
}

}  // namespace pdcphase
