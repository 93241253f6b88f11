#include "pdcphase/bayes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pdcphase/parallel.hpp"
#include "pdcphase/singlet_probe.hpp"

namespace pdcphase {

namespace {

constexpr double kPi = std::numbers::pi;

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform53(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_config(const TrialConfig& c) {
    if (c.j.twice < 0) throw std::invalid_argument("j must be >= 0");
    if (c.k < 0) throw std::invalid_argument("k must be >= 0");
    if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (!(c.phi_true > 0.0 && c.phi_true < kPi))
        throw std::invalid_argument("phi_true must lie in (0, pi)");
    if (c.grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
}

/// Likelihood of every outcome at every node, row-major over (A, B) with
/// both descending: table[node][ia * (2j+1) + ib].
struct LikelihoodTable {
    int dim = 0;
    std::vector<std::vector<double>> rows;

    static LikelihoodTable build(HalfInt j, const PosteriorGrid& grid) {
        LikelihoodTable t;
        t.dim = j.twice + 1;
        t.rows.resize(grid.nodes.size());
        for (size_t i = 0; i < grid.nodes.size(); ++i) {
            OutcomeTable table = outcome_distribution(j, grid.nodes[i]);
            auto& row = t.rows[i];
            row.resize(static_cast<size_t>(t.dim) * t.dim);
            for (int ia = 0; ia < t.dim; ++ia)
                for (int ib = 0; ib < t.dim; ++ib)
                    row[static_cast<size_t>(ia) * t.dim + ib] = table.probs(ia, ib);
        }
        return t;
    }
};

double run_trial_with_table(const TrialConfig& config, const LikelihoodTable& table,
                            int trial_index) {
    std::mt19937_64 rng = trial_rng(config.seed, trial_index);
    PosteriorGrid grid = PosteriorGrid::uniform_prior(config.grid_size);
    OutcomeTable sampling = outcome_distribution(config.j, config.phi_true);
    const int dim = config.j.twice + 1;
    for (int step = 0; step < config.k; ++step) {
        // inverse CDF over the flattened sampling table
        const double u = uniform53(rng);
        double acc = 0.0;
        int flat = dim * dim - 1;
        for (int idx = 0; idx < dim * dim; ++idx) {
            acc += sampling.probs(idx / dim, idx % dim);
            if (u < acc) {
                flat = idx;
                break;
            }
        }
        for (size_t i = 0; i < grid.density.size(); ++i)
            grid.density[i] *= table.rows[i][static_cast<size_t>(flat)];
        grid.renormalize();
    }
    switch (config.estimator) {
        case Estimator::posterior_mode:
            return grid.mode();
        case Estimator::circular_mean:
            return grid.circular_mean();
        case Estimator::posterior_mean:
            break;
    }
    return grid.mean();
}

}  // namespace

PosteriorGrid PosteriorGrid::uniform_prior(int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    PosteriorGrid g;
    g.nodes.resize(static_cast<size_t>(grid_size));
    g.density.assign(static_cast<size_t>(grid_size), 1.0 / kPi);
    const double h = kPi / (grid_size - 1);
    for (int i = 0; i < grid_size; ++i) g.nodes[static_cast<size_t>(i)] = i * h;
    return g;
}

double PosteriorGrid::quadrature_weight(size_t i) const {
    const double h = kPi / static_cast<double>(nodes.size() - 1);
    return (i == 0 || i + 1 == nodes.size()) ? 0.5 * h : h;
}

double PosteriorGrid::total_mass() const {
    double s = 0.0;
    for (size_t i = 0; i < density.size(); ++i) s += quadrature_weight(i) * density[i];
    return s;
}

double PosteriorGrid::mean() const {
    double s = 0.0, m = 0.0;
    for (size_t i = 0; i < density.size(); ++i) {
        const double w = quadrature_weight(i) * density[i];
        s += w;
        m += w * nodes[i];
    }
    return m / s;
}

double PosteriorGrid::mode() const {
    size_t argmax = 0;
    for (size_t i = 1; i < density.size(); ++i)
        if (density[i] > density[argmax]) argmax = i;
    return nodes[argmax];
}

double PosteriorGrid::circular_mean() const {
    double s = 0.0, c = 0.0;
    for (size_t i = 0; i < density.size(); ++i) {
        const double w = quadrature_weight(i) * density[i];
        s += w * std::sin(2.0 * nodes[i]);
        c += w * std::cos(2.0 * nodes[i]);
    }
    double angle = 0.5 * std::atan2(s, c);
    if (angle < 0.0) angle += kPi;
    return angle;
}

void PosteriorGrid::renormalize() {
    const double mass = total_mass();
    if (!(mass > 0.0))
        throw std::runtime_error("posterior collapsed: likelihood vanished on the whole grid");
    for (auto& d : density) d /= mass;
}

std::mt19937_64 trial_rng(uint64_t seed, int trial_index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<uint64_t>(trial_index))));
}

std::pair<HalfInt, HalfInt> sample_outcome(HalfInt j, double phi, std::mt19937_64& rng) {
    OutcomeTable table = outcome_distribution(j, phi);
    const int dim = j.twice + 1;
    const double u = uniform53(rng);
    double acc = 0.0;
    for (int ia = 0; ia < dim; ++ia) {
        for (int ib = 0; ib < dim; ++ib) {
            acc += table.probs(ia, ib);
            if (u < acc) return {HalfInt{j.twice - 2 * ia}, HalfInt{j.twice - 2 * ib}};
        }
    }
    return {HalfInt{-j.twice}, HalfInt{-j.twice}};
}

PosteriorGrid update_posterior(const PosteriorGrid& grid, HalfInt j,
                               std::pair<HalfInt, HalfInt> outcome) {
    PosteriorGrid out = grid;
    for (size_t i = 0; i < out.nodes.size(); ++i) {
        OutcomeTable table = outcome_distribution(j, out.nodes[i]);
        out.density[i] *= table.at(outcome.first, outcome.second);
    }
    out.renormalize();
    return out;
}

double run_trial(const TrialConfig& config, int trial_index) {
    check_config(config);
    PosteriorGrid probe = PosteriorGrid::uniform_prior(config.grid_size);
    LikelihoodTable table = LikelihoodTable::build(config.j, probe);
    return run_trial_with_table(config, table, trial_index);
}

TrialStats run_experiment(const TrialConfig& config) {
    check_config(config);
    PosteriorGrid probe = PosteriorGrid::uniform_prior(config.grid_size);
    LikelihoodTable table = LikelihoodTable::build(config.j, probe);
    TrialStats stats;
    stats.estimates.assign(static_cast<size_t>(config.trials), 0.0);
    parallel_for_index(static_cast<size_t>(config.trials), [&](size_t i) {
        stats.estimates[i] = run_trial_with_table(config, table, static_cast<int>(i));
    });
    double sum = 0.0, sq = 0.0;
    for (double e : stats.estimates) {
        sum += e;
        const double err = e - config.phi_true;
        sq += err * err;
    }
    stats.mean = sum / config.trials;
    stats.rmse = std::sqrt(sq / config.trials);
    stats.theoretical_limit = 1.0 / std::sqrt(config.k * quantum_fisher_pure(config.j));
    return stats;
}

}  // namespace pdcphase
