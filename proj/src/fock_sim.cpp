#include "pdcphase/fock_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdcphase/angular.hpp"
#include "pdcphase/parallel.hpp"

namespace pdcphase {

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Amplitude for a mode holding n photons to keep n-k of them:
/// sqrt(C(n,k) eta^{n-k} (1-eta)^k).
double thinning_amp(int n, int k, double eta) {
    if (k < 0 || k > n) return 0.0;
    return std::sqrt(binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
}

void check_loss(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in [0, 1]");
}

std::complex<double> pdc_amplitude(const PdcParams& pdc, int n, int m) {
    const double c = std::cosh(pdc.tau);
    const double mag = std::pow(pdc.lambda(), n) / (c * c);
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    return sign * mag * std::exp(std::complex<double>(0.0, pdc.pump_phase * n));
}

}  // namespace

double FockVector::norm2() const {
    double s = 0.0;
    for (const auto& [k, a] : amps) s += std::norm(a);
    return s;
}

FockVector build_pdc_state(const PdcParams& pdc, int cutoff) {
    if (!(pdc.tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
    if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
    const double tail = weight_tail(pdc, cutoff);
    if (tail > 0.1)
        throw std::invalid_argument("build_pdc_state: cutoff leaves source tail " +
                                    std::to_string(tail) + " > 0.1; raise the cutoff");
    FockVector state;
    state.cutoff = cutoff;
    state.tail = tail;
    // sqrt(n+1) mixture amplitude times the 1/sqrt(n+1) singlet normalization
    for (int n = 0; n <= cutoff; ++n) {
        for (int m = 0; m <= n; ++m) {
            const std::complex<double> amp = pdc_amplitude(pdc, n, m);
            if (std::norm(amp) == 0.0) continue;
            state.add(Occ{n - m, m, m, n - m}, amp);
        }
    }
    return state;
}

FockVector build_singlet_state(HalfInt j) {
    if (j.twice < 0) throw std::invalid_argument("j must be >= 0");
    const int n = j.twice;
    FockVector state;
    state.cutoff = n;
    state.tail = 0.0;
    const double inv = 1.0 / std::sqrt(n + 1.0);
    for (int m = 0; m <= n; ++m) {
        state.add(Occ{n - m, m, m, n - m}, (m % 2 == 0 ? inv : -inv));
    }
    return state;
}

BranchEnsemble apply_loss(const FockVector& state, double eta, double prune_tol) {
    check_loss(eta);
    Occ max_occ{0, 0, 0, 0};
    for (const auto& [key, amp] : state.amps) {
        Occ o = key_occ(key);
        for (int m = 0; m < 4; ++m) max_occ[m] = std::max(max_occ[m], o[m]);
    }
    // Per-mode thinning amplitude tables t[mode][n][k].
    std::array<std::vector<std::vector<double>>, 4> t;
    for (int m = 0; m < 4; ++m) {
        t[m].resize(max_occ[m] + 1);
        for (int n = 0; n <= max_occ[m]; ++n) {
            t[m][n].resize(n + 1);
            for (int k = 0; k <= n; ++k) t[m][n][k] = thinning_amp(n, k, eta);
        }
    }
    BranchEnsemble out;
    out.source_tail = state.tail;
    Occ lost;
    for (lost[0] = 0; lost[0] <= max_occ[0]; ++lost[0])
        for (lost[1] = 0; lost[1] <= max_occ[1]; ++lost[1])
            for (lost[2] = 0; lost[2] <= max_occ[2]; ++lost[2])
                for (lost[3] = 0; lost[3] <= max_occ[3]; ++lost[3]) {
                    FockVector branch_state;
                    branch_state.cutoff = state.cutoff;
                    double w = 0.0;
                    for (const auto& [key, amp] : state.amps) {
                        Occ o = key_occ(key);
                        if (o[0] < lost[0] || o[1] < lost[1] || o[2] < lost[2] || o[3] < lost[3])
                            continue;
                        double factor = t[0][o[0]][lost[0]] * t[1][o[1]][lost[1]] *
                                        t[2][o[2]][lost[2]] * t[3][o[3]][lost[3]];
                        if (factor == 0.0) continue;
                        Occ d{o[0] - lost[0], o[1] - lost[1], o[2] - lost[2], o[3] - lost[3]};
                        std::complex<double> a = amp * factor;
                        branch_state.add(d, a);
                        w += std::norm(a);
                    }
                    if (w <= 0.0) continue;
                    if (w < prune_tol) {
                        out.pruned_mass += w;
                        continue;
                    }
                    const double inv = 1.0 / std::sqrt(w);
                    for (auto& [key, amp] : branch_state.amps) amp *= inv;
                    out.branches.push_back(Branch{lost, w, std::move(branch_state)});
                }
    return out;
}

FockVector rotate_b(const FockVector& state, double phi) {
    // Group amplitudes by (n_ah, n_av, n_b); each group is a spin-(n_b/2)
    // vector indexed by descending m_b, i.e. row = n_b - h_b.
    std::unordered_map<uint64_t, std::vector<std::complex<double>>> groups;
    for (const auto& [key, amp] : state.amps) {
        Occ o = key_occ(key);
        int nb = o[2] + o[3];
        uint64_t gkey = occ_key(Occ{o[0], o[1], nb, 0});
        auto& vec = groups[gkey];
        if (vec.empty()) vec.assign(nb + 1, std::complex<double>{});
        vec[nb - o[2]] += amp;
    }
    std::unordered_map<int, DMatrix> dcache;
    FockVector out;
    out.cutoff = state.cutoff;
    out.tail = state.tail;
    for (const auto& [gkey, vec] : groups) {
        Occ g = key_occ(gkey);
        const int nb = g[2];
        auto it = dcache.find(nb);
        if (it == dcache.end()) it = dcache.emplace(nb, wigner_d(HalfInt{nb}, phi)).first;
        const Eigen::MatrixXd& d = it->second.entries;
        for (int row = 0; row <= nb; ++row) {
            std::complex<double> acc{};
            for (int col = 0; col <= nb; ++col) acc += d(row, col) * vec[col];
            if (std::norm(acc) == 0.0) continue;
            int hb = nb - row;
            out.add(Occ{g[0], g[1], hb, nb - hb}, acc);
        }
    }
    return out;
}

BranchEnsemble rotate_b(const BranchEnsemble& ensemble, double phi) {
    BranchEnsemble out;
    out.source_tail = ensemble.source_tail;
    out.pruned_mass = ensemble.pruned_mass;
    out.branches.reserve(ensemble.branches.size());
    for (const auto& b : ensemble.branches) {
        out.branches.push_back(Branch{b.lost, b.weight, rotate_b(b.state, phi)});
    }
    return out;
}

FockVector apply_jyb(const FockVector& state) {
    // J_yb = (J_+b - J_-b) / 2i with J_+b = b_h^dag b_v.
    FockVector out;
    out.cutoff = state.cutoff;
    const std::complex<double> minus_i_half(0.0, -0.5);
    for (const auto& [key, amp] : state.amps) {
        Occ o = key_occ(key);
        if (o[3] > 0) {  // raise h, lower v
            double c = std::sqrt(static_cast<double>(o[2] + 1) * o[3]);
            out.add(Occ{o[0], o[1], o[2] + 1, o[3] - 1}, minus_i_half * c * amp);
        }
        if (o[2] > 0) {  // lower h, raise v
            double c = std::sqrt(static_cast<double>(o[2]) * (o[3] + 1));
            out.add(Occ{o[0], o[1], o[2] - 1, o[3] + 1}, -minus_i_half * c * amp);
        }
    }
    return out;
}

std::complex<double> inner_product(const FockVector& bra, const FockVector& ket) {
    const FockVector& small = bra.amps.size() <= ket.amps.size() ? bra : ket;
    std::complex<double> acc{};
    for (const auto& [key, amp] : small.amps) {
        auto it_b = bra.amps.find(key);
        auto it_k = ket.amps.find(key);
        if (it_b == bra.amps.end() || it_k == ket.amps.end()) continue;
        acc += std::conj(it_b->second) * it_k->second;
    }
    return acc;
}

std::unordered_map<uint64_t, double> counts_distribution(const FockVector& state) {
    std::unordered_map<uint64_t, double> dist;
    for (const auto& [key, amp] : state.amps) dist[key] += std::norm(amp);
    return dist;
}

std::unordered_map<uint64_t, double> counts_distribution(const BranchEnsemble& ensemble) {
    std::unordered_map<uint64_t, double> dist;
    for (const auto& b : ensemble.branches) {
        for (const auto& [key, amp] : b.state.amps) dist[key] += b.weight * std::norm(amp);
    }
    return dist;
}

double mean_total_photons(const FockVector& state) {
    double num = 0.0, den = 0.0;
    for (const auto& [key, amp] : state.amps) {
        Occ o = key_occ(key);
        double p = std::norm(amp);
        num += p * (o[0] + o[1] + o[2] + o[3]);
        den += p;
    }
    return den > 0.0 ? num / den : 0.0;
}

double mean_total_photons(const BranchEnsemble& ensemble) {
    double num = 0.0, den = 0.0;
    for (const auto& b : ensemble.branches) {
        for (const auto& [key, amp] : b.state.amps) {
            Occ o = key_occ(key);
            double p = b.weight * std::norm(amp);
            num += p * (o[0] + o[1] + o[2] + o[3]);
            den += p;
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

SubspaceDensity subspace_density(const BranchEnsemble& ensemble, int n_a, int n_b) {
    if (n_a < 0 || n_b < 0) throw std::invalid_argument("subspace labels must be >= 0");
    SubspaceDensity out;
    out.n_a = n_a;
    out.n_b = n_b;
    const int dim = out.dim();
    out.rho = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd v(dim);
    for (const auto& b : ensemble.branches) {
        v.setZero();
        bool any = false;
        for (const auto& [key, amp] : b.state.amps) {
            Occ o = key_occ(key);
            if (o[0] + o[1] != n_a || o[2] + o[3] != n_b) continue;
            v(out.index(o[0], o[2])) = amp;
            any = true;
        }
        if (!any) continue;
        out.rho.noalias() += b.weight * (v * v.adjoint());
    }
    out.weight = out.rho.trace().real();
    if (out.weight < 1e-300)
        throw std::invalid_argument("subspace_density: empty subspace (" + std::to_string(n_a) +
                                    ", " + std::to_string(n_b) + ")");
    out.rho /= out.weight;
    return out;
}

SubspaceDensity subspace_density(const PdcParams& pdc, const LossParams& loss, int n_a, int n_b,
                                 int cutoff) {
    check_loss(loss.eta);
    if (n_a < 0 || n_b < 0) throw std::invalid_argument("subspace labels must be >= 0");
    if (cutoff < std::max(n_a, n_b)) throw std::invalid_argument("cutoff below requested subspace");
    const double tail = weight_tail(pdc, cutoff);
    if (tail > 0.1)
        throw std::invalid_argument("subspace_density: cutoff leaves source tail > 0.1");
    SubspaceDensity out;
    out.n_a = n_a;
    out.n_b = n_b;
    const int dim = out.dim();
    out.rho = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd v(dim);
    const double eta = loss.eta;
    for (int n = std::max(n_a, n_b); n <= cutoff; ++n) {
        const int la = n - n_a;  // photons lost from arm a
        const int lb = n - n_b;
        for (int k_ah = 0; k_ah <= la; ++k_ah) {
            const int k_av = la - k_ah;
            for (int k_bh = 0; k_bh <= lb; ++k_bh) {
                const int k_bv = lb - k_bh;
                v.setZero();
                bool any = false;
                for (int m = 0; m <= n; ++m) {
                    // source ket (n-m, m, m, n-m)
                    if (m < k_av || m < k_bh || n - m < k_ah || n - m < k_bv) continue;
                    double f = thinning_amp(n - m, k_ah, eta) * thinning_amp(m, k_av, eta) *
                               thinning_amp(m, k_bh, eta) * thinning_amp(n - m, k_bv, eta);
                    if (f == 0.0) continue;
                    v(out.index(n - m - k_ah, m - k_bh)) += pdc_amplitude(pdc, n, m) * f;
                    any = true;
                }
                if (!any) continue;
                out.rho.noalias() += v * v.adjoint();
            }
        }
    }
    out.weight = out.rho.trace().real();
    if (out.weight < 1e-300)
        throw std::invalid_argument("subspace_density: empty subspace (" + std::to_string(n_a) +
                                    ", " + std::to_string(n_b) + ")");
    out.rho /= out.weight;
    return out;
}

Eigen::MatrixXd joint_count_distribution(const PdcParams& pdc, const LossParams& loss, int cutoff,
                                         int max_n) {
    check_loss(loss.eta);
    if (max_n < 0 || cutoff < max_n) throw std::invalid_argument("need cutoff >= max_n >= 0");
    const double tail = weight_tail(pdc, cutoff);
    if (tail > 0.1)
        throw std::invalid_argument("joint_count_distribution: cutoff leaves source tail > 0.1");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(max_n + 1, max_n + 1);
    const double eta = loss.eta;
    // rows are independent; sweep them concurrently
    parallel_for_index(static_cast<size_t>(max_n) + 1, [&](size_t row) {
        const int n_a = static_cast<int>(row);
        for (int n_b = 0; n_b <= max_n; ++n_b) {
            double w = 0.0;
            for (int n = std::max(n_a, n_b); n <= cutoff; ++n) {
                const double ketp = std::norm(pdc_amplitude(pdc, n, 0));
                const int la = n - n_a;
                const int lb = n - n_b;
                for (int k_ah = 0; k_ah <= la; ++k_ah) {
                    for (int k_bh = 0; k_bh <= lb; ++k_bh) {
                        for (int m = 0; m <= n; ++m) {
                            if (m < la - k_ah || m < k_bh || n - m < k_ah || n - m < lb - k_bh)
                                continue;
                            double f = thinning_amp(n - m, k_ah, eta) *
                                       thinning_amp(m, la - k_ah, eta) *
                                       thinning_amp(m, k_bh, eta) *
                                       thinning_amp(n - m, lb - k_bh, eta);
                            w += ketp * f * f;
                        }
                    }
                }
            }
            p(n_a, n_b) = w;
        }
    });
    return p;
}

double conditional_cfi(const SubspaceDensity& density, double phi) {
    const HalfInt jb{density.n_b};
    const int na1 = density.n_a + 1;
    const int nb1 = density.n_b + 1;
    const Eigen::MatrixXd d = wigner_d(jb, phi).entries;
    const Eigen::MatrixXcd jy = spin_jy(jb);
    // Only the a-diagonal blocks of rho_phi = (I (x) d) rho (I (x) d)^T feed
    // the measured probabilities and their derivative.
    double info = 0.0;
    const std::complex<double> minus_i(0.0, -1.0);
    for (int ia = 0; ia < na1; ++ia) {
        const Eigen::MatrixXcd blk =
            d * density.rho.block(ia * nb1, ia * nb1, nb1, nb1) * d.transpose();
        // dP/dphi = diag of -i [I (x) J_y, rho_phi]
        const Eigen::MatrixXcd comm = minus_i * (jy * blk - blk * jy);
        for (int ib = 0; ib < nb1; ++ib) {
            const double p = blk(ib, ib).real();
            if (p < 1e-14) continue;
            const double dp = comm(ib, ib).real();
            info += dp * dp / p;
        }
    }
    return info;
}

double conditional_cfi(const PdcParams& pdc, const LossParams& loss, int n_a, int n_b, double phi,
                       int cutoff) {
    return conditional_cfi(subspace_density(pdc, loss, n_a, n_b, cutoff), phi);
}

double subspace_qfi(const SubspaceDensity& density) {
    const HalfInt jb{density.n_b};
    const int na1 = density.n_a + 1;
    const int nb1 = density.n_b + 1;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(density.dim(), density.dim());
    const Eigen::MatrixXcd jy = spin_jy(jb);
    for (int ia = 0; ia < na1; ++ia) h.block(ia * nb1, ia * nb1, nb1, nb1) = jy;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(density.rho);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXcd w = es.eigenvectors().adjoint() * h * es.eigenvectors();
    double info = 0.0;
    for (int q = 0; q < lam.size(); ++q) {
        for (int r = 0; r < lam.size(); ++r) {
            const double sum = lam(q) + lam(r);
            if (sum < 1e-14) continue;
            const double diff = lam(q) - lam(r);
            info += 2.0 * diff * diff / sum * std::norm(w(q, r));
        }
    }
    return info;
}

double total_lossy_qfi_numeric(const PdcParams& pdc, const LossParams& loss, int cutoff,
                               double tail_tol) {
    check_loss(loss.eta);
    if (!(pdc.tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
    if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
    const LossyGaussianParams g = effective_params(pdc, loss);
    const double chi = g.chi;
    // Mass of eigenvalues with total occupation above the cutoff: the total
    // follows a negative binomial with 4 thermal modes.
    double mass = 0.0;
    {
        const double base = std::pow(1.0 - chi, 4);
        double chis = 1.0;
        for (int s = 0; s <= cutoff; ++s) {
            mass += base * binomial(s + 3, 3) * chis;
            chis *= chi;
        }
    }
    if (1.0 - mass > tail_tol)
        throw std::invalid_argument("total_lossy_qfi_numeric: cutoff leaves eigenvalue tail " +
                                    std::to_string(1.0 - mass) + " > tolerance");
    std::vector<double> chipow(cutoff + 1);
    chipow[0] = 1.0;
    for (int s = 1; s <= cutoff; ++s) chipow[s] = chipow[s - 1] * chi;
    // One ladder component of T evaluated over all Fock 4-tuples; the four
    // components contribute equally.
    double acc = 0.0;
    for (int ah = 1; ah <= cutoff; ++ah) {
        for (int av = 1; av + ah <= cutoff; ++av) {
            const double elem2 = static_cast<double>(ah) * av;
            for (int bh = 0; ah + av + bh <= cutoff; ++bh) {
                for (int bv = 0; ah + av + bh + bv <= cutoff; ++bv) {
                    const int s = ah + av + bh + bv;
                    const double num = chipow[s] - chipow[s - 2];
                    const double den = chipow[s] + chipow[s - 2];
                    if (den <= 0.0) continue;
                    acc += elem2 * num * num / den;
                }
            }
        }
    }
    const double s2 = std::sinh(2.0 * g.tau_eff);
    const double nb1 = 1.0 + g.n_bar;
    return 0.5 * s2 * s2 * acc / (nb1 * nb1 * nb1 * nb1);
}

BlockDecomposition block_decomposition(const SubspaceDensity& density) {
    const HalfInt ja{density.n_a};
    const HalfInt jb{density.n_b};
    const Eigen::MatrixXd w = coupled_basis_matrix(ja, jb);
    const Eigen::MatrixXcd rho_c = w.transpose() * density.rho * w;
    BlockDecomposition out;
    int offset = 0;
    std::vector<std::pair<int, int>> block_spans;  // (2J, offset)
    for (int tJ = ja.twice + jb.twice; tJ >= std::abs(ja.twice - jb.twice); tJ -= 2) {
        const int bdim = tJ + 1;
        const Eigen::MatrixXcd blk = rho_c.block(offset, offset, bdim, bdim);
        JBlockStats stats;
        stats.mu = blk.trace().real();
        Eigen::MatrixXcd dev = blk - (stats.mu / bdim) * Eigen::MatrixXcd::Identity(bdim, bdim);
        stats.identity_deviation = dev.operatorNorm();
        out.blocks[tJ] = stats;
        block_spans.emplace_back(tJ, offset);
        offset += bdim;
    }
    double resid = 0.0;
    for (size_t bi = 0; bi < block_spans.size(); ++bi) {
        for (size_t bj = 0; bj < block_spans.size(); ++bj) {
            if (bi == bj) continue;
            const int rows = block_spans[bi].first + 1;
            const int cols = block_spans[bj].first + 1;
            resid = std::max(resid, rho_c.block(block_spans[bi].second, block_spans[bj].second,
                                                rows, cols)
                                        .cwiseAbs()
                                        .maxCoeff());
        }
    }
    out.off_block_residual = resid;
    return out;
}

}  // namespace pdcphase
