#include "pdcphase/pdc_source.hpp"

#include <stdexcept>

namespace pdcphase {

namespace {
void check_tau(const PdcParams& params) {
    if (!(params.tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
}
}  // namespace

double weight_tail(const PdcParams& params, int max_twice_j) {
    check_tau(params);
    if (max_twice_j < 0) return 1.0;
    // sum_{n >= K} (n+1) x^n = x^K ((K+1) - K x) / (1-x)^2, x = tanh^2 tau
    const double x = params.lambda() * params.lambda();
    if (x == 0.0) return 0.0;
    const double k = static_cast<double>(max_twice_j + 1);
    const double c = std::cosh(params.tau);
    const double geo = std::pow(x, k) * ((k + 1.0) - k * x) / ((1.0 - x) * (1.0 - x));
    return geo / (c * c * c * c);
}

int default_weight_cutoff(const PdcParams& params, double tail_tol) {
    check_tau(params);
    int cutoff = 0;
    while (weight_tail(params, cutoff) > tail_tol && cutoff < 1000000) cutoff += 1;
    return cutoff;
}

PdcWeights singlet_weights(const PdcParams& params, int max_twice_j) {
    check_tau(params);
    if (max_twice_j < 0) throw std::invalid_argument("max_twice_j must be >= 0");
    const double x = params.lambda() * params.lambda();
    const double c = std::cosh(params.tau);
    const double norm = 1.0 / (c * c * c * c);
    PdcWeights out;
    out.tau = params.tau;
    out.max_twice_j = max_twice_j;
    out.weights.resize(static_cast<size_t>(max_twice_j) + 1);
    double xn = 1.0;
    for (int n = 0; n <= max_twice_j; ++n) {
        out.weights[static_cast<size_t>(n)] = (n + 1.0) * xn * norm;
        xn *= x;
    }
    out.tail = weight_tail(params, max_twice_j);
    return out;
}

FluxMoments flux_moments(const PdcParams& params) {
    check_tau(params);
    const double s = std::sinh(params.tau);
    return FluxMoments{4.0 * s * s, std::cosh(4.0 * params.tau) - 1.0};
}

double ensemble_qfi_lossless(const PdcParams& params) {
    FluxMoments m = flux_moments(params);
    const double second_moment = m.variance + m.mean * m.mean;
    return second_moment / 12.0 + m.mean / 3.0;
}

}  // namespace pdcphase
