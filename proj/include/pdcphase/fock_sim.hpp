#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "pdcphase/half_int.hpp"
#include "pdcphase/loss_model.hpp"
#include "pdcphase/pdc_source.hpp"

namespace pdcphase {

/// Occupation of the four optic modes (a_h, a_v, b_h, b_v).
using Occ = std::array<int, 4>;

inline uint64_t occ_key(const Occ& o) {
    return (static_cast<uint64_t>(o[0]) << 48) | (static_cast<uint64_t>(o[1]) << 32) |
           (static_cast<uint64_t>(o[2]) << 16) | static_cast<uint64_t>(o[3]);
}
inline Occ key_occ(uint64_t k) {
    return Occ{static_cast<int>(k >> 48), static_cast<int>((k >> 32) & 0xffff),
               static_cast<int>((k >> 16) & 0xffff), static_cast<int>(k & 0xffff)};
}

/// Sparse four-mode Fock state. States built from a truncated source are not
/// renormalized: the norm deficit is the reported truncation tail.
struct FockVector {
    int cutoff = 0;   // max photons per arm
    double tail = 0.0;
    std::unordered_map<uint64_t, std::complex<double>> amps;

    std::complex<double> amp(const Occ& o) const {
        auto it = amps.find(occ_key(o));
        return it == amps.end() ? std::complex<double>{} : it->second;
    }
    void add(const Occ& o, std::complex<double> a) { amps[occ_key(o)] += a; }
    double norm2() const;
};

/// One Kraus branch of the loss channel: the per-mode loss counts, the
/// branch probability, and the normalized post-loss state.
struct Branch {
    Occ lost{};
    double weight = 0.0;
    FockVector state;
};

/// Pure-state decomposition of the post-loss density operator.
struct BranchEnsemble {
    std::vector<Branch> branches;
    double source_tail = 0.0;
    double pruned_mass = 0.0;
};

/// Normalized conditional state on the detected-(n_a, n_b) subspace together
/// with its post-selection probability. Basis index is
/// (n_a - h_a) * (n_b + 1) + (n_b - h_b), i.e. m_a and m_b both descending.
struct SubspaceDensity {
    int n_a = 0;
    int n_b = 0;
    Eigen::MatrixXcd rho;
    double weight = 0.0;

    int dim() const { return (n_a + 1) * (n_b + 1); }
    int index(int h_a, int h_b) const { return (n_a - h_a) * (n_b + 1) + (n_b - h_b); }
};

struct JBlockStats {
    double mu = 0.0;
    double identity_deviation = 0.0;
};

/// Weights and identity deviations of the total-spin-J blocks, keyed by 2J,
/// plus the largest matrix element found between different J blocks.
struct BlockDecomposition {
    std::map<int, JBlockStats> blocks;
    double off_block_residual = 0.0;
};

/// Truncated PDC state; rejects cutoffs whose source tail exceeds 0.1.
FockVector build_pdc_state(const PdcParams& pdc, int cutoff);

/// The spin-j singlet realized in four modes (2j photons per arm).
FockVector build_singlet_state(HalfInt j);

/// Per-mode photon loss with transmission eta, one branch per 4-tuple of
/// loss counts; branches below prune_tol are dropped and their mass reported.
BranchEnsemble apply_loss(const FockVector& state, double eta, double prune_tol = 1e-16);

/// exp(-i phi J_yb): rotates b-mode amplitudes within each fixed-n_b sector
/// by the spin-(n_b/2) d-matrix. a modes untouched.
FockVector rotate_b(const FockVector& state, double phi);
BranchEnsemble rotate_b(const BranchEnsemble& ensemble, double phi);

/// J_yb applied to a state (for operator moments).
FockVector apply_jyb(const FockVector& state);

std::complex<double> inner_product(const FockVector& bra, const FockVector& ket);

/// Photon-count distribution over occupation 4-tuples.
std::unordered_map<uint64_t, double> counts_distribution(const FockVector& state);
std::unordered_map<uint64_t, double> counts_distribution(const BranchEnsemble& ensemble);

/// Mean of n_ah + n_av + n_bh + n_bv, normalized over the truncated state.
double mean_total_photons(const FockVector& state);
double mean_total_photons(const BranchEnsemble& ensemble);

SubspaceDensity subspace_density(const BranchEnsemble& ensemble, int n_a, int n_b);

/// Same conditional state built directly from the source parameters,
/// enumerating only the loss branches that land on the requested subspace.
SubspaceDensity subspace_density(const PdcParams& pdc, const LossParams& loss, int n_a, int n_b,
                                 int cutoff);

/// Post-selection weights P(n_a, n_b) for all n_a, n_b <= max_n.
Eigen::MatrixXd joint_count_distribution(const PdcParams& pdc, const LossParams& loss, int cutoff,
                                         int max_n);

/// Classical Fisher information of the J_za x J_zb (photon-number difference)
/// measurement on the rotated conditional state, with the analytic
/// commutator derivative.
double conditional_cfi(const SubspaceDensity& density, double phi);
double conditional_cfi(const PdcParams& pdc, const LossParams& loss, int n_a, int n_b, double phi,
                       int cutoff);

/// Mixed-state quantum Fisher information of the conditional state under
/// J_yb, from its eigendecomposition.
double subspace_qfi(const SubspaceDensity& density);

/// Direct evaluation of the ensemble quantum Fisher information in the
/// thermal eigenbasis of the lossy source: eigenvalue ladder chi^S and the
/// two-mode ladder operator matrix elements. cutoff bounds the total photon
/// number S; the neglected eigenvalue mass must stay below tail_tol.
double total_lossy_qfi_numeric(const PdcParams& pdc, const LossParams& loss, int cutoff,
                               double tail_tol = 1e-9);

BlockDecomposition block_decomposition(const SubspaceDensity& density);

}  // namespace pdcphase
