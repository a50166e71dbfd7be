#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qcs/noise.hpp"
#include "qcs/protocol.hpp"

using namespace qcs;

namespace {

DensityMatrix random_density(int n, Rng &rng) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::MatrixXcd g(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            g(r, c) = cplx(rng.normal(), rng.normal());
        }
    }
    Eigen::MatrixXcd m = g * g.adjoint();
    return DensityMatrix(n, m / m.trace().real());
}

double max_diff(const DensityMatrix &a, const DensityMatrix &b) {
    return (a.elems() - b.elems()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Dephase, Examples) {
    Rng rng(1);
    const DensityMatrix rho = random_density(3, rng);
    EXPECT_LT(max_diff(dephase(rho, 0.0), rho), 1e-15);

    Eigen::MatrixXcd zzz = embed_operator(3, 1, gates::z()) * embed_operator(3, 2, gates::z()) *
                           embed_operator(3, 3, gates::z());
    EXPECT_LT((dephase(rho, 1.0).elems() - zzz * rho.elems() * zzz).cwiseAbs().maxCoeff(), 1e-14);

    const DensityMatrix half = dephase(rho, 0.5);
    for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 8; ++j) {
            if (i != j) {
                EXPECT_EQ(std::abs(half.elems()(i, j)), 0.0);
            } else {
                EXPECT_NEAR(std::abs(half.elems()(i, j) - rho.elems()(i, j)), 0.0, 1e-15);
            }
        }
    }
    EXPECT_THROW(dephase(rho, -0.1), InvalidArgument);
    EXPECT_THROW(dephase(rho, 1.1), InvalidArgument);
}

TEST(Dephase, MatchesExplicitChannelSum) {
    Rng rng(2);
    for (double p : {0.0, 0.07, 0.3, 0.5, 0.81, 1.0}) {
        const DensityMatrix rho = random_density(4, rng);
        const Eigen::MatrixXcd expect = oracle::dephase_explicit(rho.elems(), 4, p);
        EXPECT_LT((dephase(rho, p).elems() - expect).cwiseAbs().maxCoeff(), 1e-10) << p;
    }
    const DensityMatrix s = DensityMatrix::from_pure(supersinglet(4));
    EXPECT_LT((dephase(s, 0.2).elems() - oracle::dephase_explicit(s.elems(), 4, 0.2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dephase, TracePreservingAndPositive) {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const DensityMatrix rho = random_density(3, rng);
        const DensityMatrix out = dephase(rho, rng.uniform());
        EXPECT_NEAR(out.trace().real(), 1.0, 1e-10);
        EXPECT_GE(out.min_eigenvalue(), -1e-9);
        EXPECT_LT(out.hermiticity_error(), 1e-15);
    }
}

TEST(DephasedAmplitudes, Examples) {
    for (int n : {4, 6, 8}) {
        EXPECT_LT(dephased_amplitudes(n, 0.0).max_abs_difference(amplitude_closed_form(n)), 1e-10);
        for (const auto &e : dephased_amplitudes(n, 0.5).entries) {
            EXPECT_NEAR(e.amplitude, 0.0, 1e-10);
        }
    }
    const double g4 = dephased_amplitudes(4, 0.2).at(2);
    EXPECT_NEAR(dephased_amplitudes(6, 0.2).at(2), g4, 1e-10);
    EXPECT_NEAR(dephased_amplitudes(8, 0.2).at(3), g4, 1e-10);
    EXPECT_THROW(dephased_amplitudes(2, 0.1), InvalidArgument);
}

TEST(DephasedAmplitudes, QuadraticDecayAndSymmetry) {
    for (int n : {4, 6}) {
        const AmplitudeTable a0 = amplitude_closed_form(n);
        for (double p : {0.05, 0.2, 0.35}) {
            const AmplitudeTable ap = dephased_amplitudes(n, p);
            const AmplitudeTable aq = dephased_amplitudes(n, 1.0 - p);
            for (int q = 2; q <= n; ++q) {
                EXPECT_NEAR(ap.at(q), (1 - 2 * p) * (1 - 2 * p) * a0.at(q), 1e-10);
                EXPECT_NEAR(ap.at(q), aq.at(q), 1e-10);
            }
        }
    }
}

TEST(PreskillWorstCase, Examples) {
    const StateVector s = supersinglet(4);
    EXPECT_LT((preskill_worst_case(s, 0.0).amps() - s.amps()).norm(), 1e-15);
    for (double eps : {0.05, 0.3, 1.0}) {
        EXPECT_NEAR(fidelity(preskill_worst_case(s, eps), s), std::pow(std::cos(eps), 2), 1e-12);
    }
    EXPECT_NEAR(fidelity(preskill_worst_case(s, 0.3), s), 0.91266780745, 1e-10);
    EXPECT_THROW(preskill_worst_case(StateVector(4), 0.1), InvalidArgument);
}

TEST(PreskillWorstCase, SignalShiftsByTwoEpsilon) {
    // Exact expectation of X_n on the corrected branch after evolution.
    const int n = 4;
    const StateVector s = supersinglet(n);
    for (double eps : {0.1, 0.25}) {
        const StateVector w = preskill_worst_case(s, eps);
        for (double wt : {0.5, 1.4}) {
            const StateVector plus = evolve(project_normalized(w, 1, Basis::x().plus), wt, 1.0);
            for (int q = 2; q <= n; ++q) {
                EXPECT_NEAR(expectation(plus, PauliString::single(n, q, Pauli::X)),
                            oracle::amplitude(q, n) * std::cos(wt - 2 * eps), 1e-10);
            }
        }
    }
}

TEST(PreskillWorstCase, SimulatedPhaseOffset) {
    Rng rng(4);
    const int n = 4, shots = 40000;
    const double eps = 0.15, t = 1.2;
    const StateVector w = preskill_worst_case(supersinglet(n), eps);
    RunOptions ro;
    ro.keep_samples = false;
    const RunRecord r = simulate_run({n, 1.0, CorrectionMode::Physical, 4}, w, amplitude_closed_form(n), t, shots, rng, ro);
    for (const auto &p : r.parties) {
        const double sd = 2.0 / std::sqrt(shots) / (std::abs(p.amplitude) * std::sin(t - 2 * eps));
        EXPECT_NEAR(p.t_estimate, t - 2 * eps, 4 * sd) << p.party;
    }
}

TEST(Fidelity, Examples) {
    const StateVector s = supersinglet(4);
    EXPECT_NEAR(fidelity(DensityMatrix::from_pure(s), s), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(DensityMatrix::maximally_mixed(4), s), 1.0 / 16.0, 1e-15);
    EXPECT_THROW(fidelity(DensityMatrix::maximally_mixed(3), s), InvalidArgument);
    EXPECT_THROW(fidelity(StateVector(3), s), InvalidArgument);
}
