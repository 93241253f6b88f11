#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "pdcphase/half_int.hpp"

namespace pdcphase {

/// Discretized posterior over phi on [0, pi]: equally spaced nodes with
/// trapezoid quadrature, kept normalized to unit mass after every update.
struct PosteriorGrid {
    std::vector<double> nodes;
    std::vector<double> density;

    static PosteriorGrid uniform_prior(int grid_size);

    double quadrature_weight(size_t i) const;
    double total_mass() const;
    double mean() const;
    /// Node of highest density.
    double mode() const;
    /// Mean of the doubled angle, unwrapped to [0, pi]; insensitive to the
    /// domain endpoints.
    double circular_mean() const;
    /// Throws if the density has collapsed to zero everywhere.
    void renormalize();
};

/// Point estimator applied to the final posterior. The mean is the default;
/// the variants exist for sensitivity checks.
enum class Estimator { posterior_mean, posterior_mode, circular_mean };

struct TrialConfig {
    HalfInt j;
    int k = 20;
    int trials = 250;
    double phi_true = 0.0;
    uint64_t seed = 0;
    int grid_size = 2048;
    Estimator estimator = Estimator::posterior_mean;
};

struct TrialStats {
    std::vector<double> estimates;
    double mean = 0.0;
    double rmse = 0.0;
    double theoretical_limit = 0.0;  // 1 / sqrt(k I_qu)
};

/// Deterministic per-trial generator: mt19937_64 seeded through a splitmix64
/// mix of (seed, trial_index), so trials form independent reproducible
/// streams regardless of execution order.
std::mt19937_64 trial_rng(uint64_t seed, int trial_index);

/// One (A, B) measurement drawn by inverse CDF over the flattened outcome
/// table, consuming exactly one 53-bit uniform from the generator.
std::pair<HalfInt, HalfInt> sample_outcome(HalfInt j, double phi, std::mt19937_64& rng);

/// Bayes update: multiply by the outcome likelihood P_AB(phi) pointwise and
/// renormalize under the trapezoid rule.
PosteriorGrid update_posterior(const PosteriorGrid& grid, HalfInt j,
                               std::pair<HalfInt, HalfInt> outcome);

/// k sample/update rounds from the uniform prior; returns the posterior mean.
double run_trial(const TrialConfig& config, int trial_index);

/// Independent trials (run concurrently, reduced by trial index) plus the
/// summary statistics against the Cramer-Rao limit.
TrialStats run_experiment(const TrialConfig& config);

}  // namespace pdcphase
