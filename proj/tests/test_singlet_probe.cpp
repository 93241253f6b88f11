#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pdcphase/fock_sim.hpp"
#include "pdcphase/singlet_probe.hpp"

using namespace pdcphase;

namespace {

/// Outcome distribution realized the slow way: singlet in four modes, rotate
/// the b arm, read photon-count probabilities back as (A, B).
Eigen::MatrixXd fock_pipeline_distribution(HalfInt j, double phi) {
    FockVector rotated = rotate_b(build_singlet_state(j), phi);
    const int dim = j.twice + 1;
    Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& [key, p] : counts_distribution(rotated)) {
        Occ o = key_occ(key);
        // 2A = n_ah - n_av, row index (2j - 2A)/2
        const int row = (j.twice - (o[0] - o[1])) / 2;
        const int col = (j.twice - (o[2] - o[3])) / 2;
        probs(row, col) += p;
    }
    return probs;
}

}  // namespace

TEST_CASE("zero phase gives perfectly anticorrelated outcomes") {
    HalfInt j{3};
    OutcomeTable t = outcome_distribution(j, 0.0);
    for (int ia = 0; ia < t.dim(); ++ia) {
        for (int ib = 0; ib < t.dim(); ++ib) {
            const double expected = (ib == t.dim() - 1 - ia) ? 1.0 / t.dim() : 0.0;
            REQUIRE(t.probs(ia, ib) == doctest::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("spin-1/2 closed form entry") {
    const double phi = 0.77;
    OutcomeTable t = outcome_distribution(HalfInt{1}, phi);
    const double s = std::sin(phi / 2);
    CHECK(t.at(HalfInt{-1}, HalfInt{-1}) == doctest::Approx(s * s / 2.0).epsilon(1e-13));
}

TEST_CASE("outcome tables are normalized and nonnegative") {
    for (HalfInt j : {HalfInt{1}, HalfInt{3}, HalfInt{8}}) {
        for (double phi : {0.0, 0.4, 1.9, 3.1}) {
            OutcomeTable t = outcome_distribution(j, phi);
            CHECK(t.probs.minCoeff() >= 0.0);
            CHECK(t.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("distribution equals the Fock-space pipeline") {
    for (int twice_j = 1; twice_j <= 6; ++twice_j) {
        for (double phi : {0.25, 0.7, 1.9}) {
            OutcomeTable t = outcome_distribution(HalfInt{twice_j}, phi);
            Eigen::MatrixXd brute = fock_pipeline_distribution(HalfInt{twice_j}, phi);
            REQUIRE((t.probs - brute).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("mirror and wrap symmetries") {
    for (double phi : {0.31, 1.7, 2.9}) {
        OutcomeTable plus = outcome_distribution(HalfInt{5}, phi);
        OutcomeTable minus = outcome_distribution(HalfInt{5}, -phi);
        OutcomeTable wrap = outcome_distribution(HalfInt{5}, 2.0 * std::numbers::pi - phi);
        CHECK((plus.probs - minus.probs).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((plus.probs - wrap.probs).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("classical Fisher information hits the closed form") {
    CHECK(classical_fisher(HalfInt::whole(2), 0.9) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(classical_fisher(HalfInt{1}, 2.2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(classical_fisher(HalfInt::whole(3), 1.1) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("classical Fisher information matches finite differences") {
    CHECK(classical_fisher(HalfInt::whole(3), 1.1) ==
          doctest::Approx(oracles::fd_classical_fisher(HalfInt::whole(3), 1.1)).epsilon(1e-5));
    CHECK(classical_fisher(HalfInt{3}, 0.6) ==
          doctest::Approx(oracles::fd_classical_fisher(HalfInt{3}, 0.6)).epsilon(1e-5));
}

TEST_CASE("classical equals quantum Fisher information for every phi") {
    for (int twice_j = 1; twice_j <= 20; ++twice_j) {
        HalfInt j{twice_j};
        const double target = quantum_fisher_pure(j);
        for (int i = 0; i < 50; ++i) {
            const double phi = 0.03 + (std::numbers::pi - 0.06) * i / 49.0;
            REQUIRE(classical_fisher(j, phi) == doctest::Approx(target).epsilon(1e-9 / target));
        }
    }
}

TEST_CASE("pure-state quantum Fisher information") {
    CHECK(quantum_fisher_pure(HalfInt{1}) == doctest::Approx(1.0));
    CHECK(quantum_fisher_pure(HalfInt{0}) == 0.0);
    CHECK(quantum_fisher_pure(HalfInt::whole(2)) == doctest::Approx(8.0));
}

TEST_CASE("the probe state has total spin zero") {
    // apply J_{y,total} = J_ya + J_yb in the four-mode realization
    auto apply_jya = [](const FockVector& state) {
        FockVector out;
        out.cutoff = state.cutoff;
        const std::complex<double> minus_i_half(0.0, -0.5);
        for (const auto& [key, amp] : state.amps) {
            Occ o = key_occ(key);
            if (o[1] > 0) out.add(Occ{o[0] + 1, o[1] - 1, o[2], o[3]},
                                  minus_i_half * std::sqrt((o[0] + 1.0) * o[1]) * amp);
            if (o[0] > 0) out.add(Occ{o[0] - 1, o[1] + 1, o[2], o[3]},
                                  -minus_i_half * std::sqrt(o[0] * (o[1] + 1.0)) * amp);
        }
        return out;
    };
    for (SingletProbe probe : {SingletProbe{HalfInt{1}}, SingletProbe{HalfInt{4}}}) {
        FockVector s = build_singlet_state(probe.j);
        FockVector jy_tot = apply_jya(s);
        for (const auto& [key, amp] : apply_jyb(s).amps) jy_tot.amps[key] += amp;
        CHECK(jy_tot.norm2() < 1e-24);  // J_{y,total} annihilates the singlet
        for (const auto& [key, amp] : s.amps) {
            Occ o = key_occ(key);
            REQUIRE(o[0] - o[1] + o[2] - o[3] == 0);  // J_{z,total} = 0 per ket
        }
    }
}

TEST_CASE("quantum Fisher information equals four times the generator variance") {
    for (HalfInt j : {HalfInt{1}, HalfInt{3}, HalfInt::whole(2)}) {
        FockVector singlet = build_singlet_state(j);
        FockVector jpsi = apply_jyb(singlet);
        const double mean = inner_product(singlet, jpsi).real();
        const double second = inner_product(jpsi, jpsi).real();
        CHECK(quantum_fisher_pure(j) ==
              doctest::Approx(4.0 * (second - mean * mean)).epsilon(1e-12));
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("singlet beats the matched Bell-pair bank") {
    for (int twice_j = 2; twice_j <= 20; ++twice_j) {
        REQUIRE(quantum_fisher_pure(HalfInt{twice_j}) > static_cast<double>(twice_j));
    }
}

TEST_CASE("non-finite phase rejected") {
    CHECK_THROWS_AS(outcome_distribution(HalfInt{2}, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(classical_fisher(HalfInt{2}, INFINITY), std::invalid_argument);
}
