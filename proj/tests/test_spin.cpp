#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcs/purify.hpp"
#include "qcs/spin.hpp"

using namespace qcs;

namespace {

double commutator_error(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b, const Eigen::MatrixXcd &c) {
    return (a * b - b * a - kI * c).cwiseAbs().maxCoeff();
}

std::vector<StateVector> test_singlets() {
    Rng rng(17);
    std::vector<StateVector> out{supersinglet(2), supersinglet(4), supersinglet(6)};
    for (int n : {4, 6}) {
        out.push_back(random_singlet(n, rng));
    }
    out.push_back(homogeneous_singlet(4, rng).state);
    return out;
}

}  // namespace

TEST(Catalan, Values) {
    EXPECT_EQ(catalan(0), 1u);
    EXPECT_EQ(catalan(1), 1u);
    EXPECT_EQ(catalan(2), 2u);
    EXPECT_EQ(catalan(3), 5u);
    EXPECT_EQ(catalan(4), 14u);
    EXPECT_EQ(catalan(30), 3814986502092304ULL);
    for (int h = 0; h <= 30; ++h) {
        EXPECT_EQ(catalan(h), binomial(2 * h, h) / static_cast<std::uint64_t>(h + 1));
    }
    EXPECT_THROW(catalan(-1), InvalidArgument);
}

TEST(SpinOperators, CommutationRelations) {
    for (int n : {1, 2, 3, 4}) {
        const SpinOperators s = spin_operators(n);
        EXPECT_LT(commutator_error(s.sx, s.sy, s.sz), 1e-10);
        EXPECT_LT(commutator_error(s.sy, s.sz, s.sx), 1e-10);
        EXPECT_LT(commutator_error(s.sz, s.sx, s.sy), 1e-10);
        for (const auto *m : {&s.sx, &s.sy, &s.sz}) {
            EXPECT_LT((s.s2 * *m - *m * s.s2).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(SpinOperators, MatrixFreeAgreesWithDense) {
    Rng rng(1);
    const SpinOperators s = spin_operators(4);
    Eigen::VectorXcd v(16);
    for (Eigen::Index k = 0; k < 16; ++k) {
        v(k) = cplx(rng.normal(), rng.normal());
    }
    const StateVector psi(4, v / v.norm());
    EXPECT_LT((apply_total_spin(psi, Axis::X).amps() - s.sx * psi.amps()).norm(), 1e-12);
    EXPECT_LT((apply_total_spin(psi, Axis::Y).amps() - s.sy * psi.amps()).norm(), 1e-12);
    EXPECT_LT((apply_total_spin(psi, Axis::Z).amps() - s.sz * psi.amps()).norm(), 1e-12);
    EXPECT_LT((apply_total_spin_squared(psi).amps() - s.s2 * psi.amps()).norm(), 1e-12);
}

TEST(Dicke, Examples) {
    const StateVector d21 = dicke_state({2, 1});
    EXPECT_NEAR(d21.amp("01").real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(d21.amp("10").real(), 1.0 / std::sqrt(2.0), 1e-15);

    const StateVector d42 = dicke_state({4, 2});
    int nonzero = 0;
    for (std::size_t k = 0; k < 16; ++k) {
        if (std::abs(d42[k]) > 0) {
            ++nonzero;
            EXPECT_NEAR(d42[k].real(), 1.0 / std::sqrt(6.0), 1e-15);
        }
    }
    EXPECT_EQ(nonzero, 6);
    EXPECT_NEAR(std::abs(dicke_state({5, 0})[0]), 1.0, 1e-15);
    EXPECT_THROW(dicke_state({3, 4}), InvalidArgument);
    EXPECT_THROW(dicke_state({3, -1}), InvalidArgument);
}

TEST(Dicke, MatchesLoweringOperatorOracle) {
    for (int m = 1; m <= 6; ++m) {
        for (int k = 0; k <= m; ++k) {
            const StateVector d = dicke_state({m, k});
            EXPECT_LT((d.amps() - oracle::dicke_by_lowering(m, k)).norm(), 1e-12) << m << "," << k;
            const StateVector sz = apply_total_spin(d, Axis::Z);
            EXPECT_LT((sz.amps() - (m - 2.0 * k) / 2.0 * d.amps()).norm(), 1e-12);
        }
    }
}

TEST(Supersinglet, Examples) {
    EXPECT_TRUE(equal_up_to_phase(supersinglet(2), bell::psi_minus()));

    const StateVector s4 = supersinglet(4);
    const double a = 1.0 / std::sqrt(3.0), b = -1.0 / (2.0 * std::sqrt(3.0));
    Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(16);
    for (const char *bits : {"0011", "1100"}) {
        expect(static_cast<Eigen::Index>(basis_index(bits))) = a;
    }
    for (const char *bits : {"0101", "0110", "1001", "1010"}) {
        expect(static_cast<Eigen::Index>(basis_index(bits))) = b;
    }
    EXPECT_TRUE(equal_up_to_phase(s4, StateVector(4, expect)));

    EXPECT_NEAR(spin_squared_expectation(supersinglet(6)), 0.0, 1e-10);
    EXPECT_THROW(supersinglet(3), InvalidArgument);
    EXPECT_THROW(supersinglet(14), InvalidArgument);
}

TEST(Supersinglet, PermutationFormAgrees) {
    for (int n : {2, 4, 6, 8}) {
        EXPECT_NEAR(overlap_modulus(supersinglet(n), supersinglet_permutation_form(n)), 1.0, 1e-10) << n;
        EXPECT_NEAR(supersinglet_permutation_form(n).norm_squared(), 1.0, 1e-12);
    }
}

TEST(Supersinglet, BasisFreeConstruction) {
    for (int n : {2, 4, 6}) {
        for (Axis a : {Axis::X, Axis::Y}) {
            EXPECT_NEAR(overlap_modulus(supersinglet_in_basis(n, a), supersinglet(n)), 1.0, 1e-10);
        }
    }
}

TEST(Supersinglet, GlobalRotationInvariance) {
    Rng rng(2);
    const StateVector s = supersinglet(6);
    for (int i = 0; i < 100; ++i) {
        EXPECT_NEAR(overlap_modulus(apply_global_rotation(s, gates::random_unitary(rng)), s), 1.0, 1e-10);
    }
}

TEST(SingletSubspace, CatalanDimensionAndOrthonormality) {
    for (int n : {2, 4, 6, 8}) {
        const SingletBasis b = singlet_subspace(n);
        ASSERT_EQ(b.size(), catalan(n / 2)) << n;
        for (std::size_t i = 0; i < b.size(); ++i) {
            EXPECT_LT(singlet_residual(b.vectors[i]), 1e-9);
            for (std::size_t j = 0; j < b.size(); ++j) {
                EXPECT_NEAR(std::abs(inner(b.vectors[i], b.vectors[j])), i == j ? 1.0 : 0.0, 1e-10);
            }
        }
    }
    EXPECT_TRUE(equal_up_to_phase(singlet_subspace(2).vectors.front(), bell::psi_minus()));
    EXPECT_THROW(singlet_subspace(5), InvalidArgument);
}

TEST(SingletSubspace, AmbiguousCutoffFails) {
    // The N = 4 nonzero S^2 eigenvalues are 2 and 6; a cutoff of 1 puts 2 in
    // the ambiguous band.
    EXPECT_THROW(singlet_subspace(4, 1.0), InvariantViolation);
}

TEST(RandomSinglet, Properties) {
    Rng rng(3);
    const SingletBasis b4 = singlet_subspace(4);
    for (int i = 0; i < 50; ++i) {
        const StateVector s = random_singlet(b4, rng);
        EXPECT_NEAR(spin_squared_expectation(s), 0.0, 1e-9);
        double sum = 0.0;
        for (int q = 2; q <= 4; ++q) {
            const double zz = expectation(s, PauliString::pair(4, 1, Pauli::Z, q, Pauli::Z));
            EXPECT_GE(zz, -1.0 - 1e-9);
            EXPECT_LE(zz, 1.0 / 3.0 + 1e-9);
            sum += zz;
        }
        EXPECT_NEAR(sum, -1.0, 1e-9);
    }
}

TEST(SingletProperties, CorrelationIdentities) {
    for (const auto &s : test_singlets()) {
        const int n = s.n_qubits();
        for (int a = 1; a <= n; ++a) {
            for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
                EXPECT_NEAR(expectation(s, PauliString::single(n, a, p)), 0.0, 1e-10);
            }
            for (int b = a + 1; b <= n; ++b) {
                const double zz = expectation(s, PauliString::pair(n, a, Pauli::Z, b, Pauli::Z));
                EXPECT_NEAR(expectation(s, PauliString::pair(n, a, Pauli::X, b, Pauli::X)), zz, 1e-10);
                EXPECT_NEAR(expectation(s, PauliString::pair(n, a, Pauli::Y, b, Pauli::Y)), zz, 1e-10);
                EXPECT_NEAR(expectation(s, PauliString::pair(n, a, Pauli::X, b, Pauli::Y)), 0.0, 1e-10);
                EXPECT_NEAR(expectation(s, PauliString::pair(n, a, Pauli::Z, b, Pauli::X)), 0.0, 1e-10);
                const cplx pm = local_correlator(s, a, gates::sigma_plus(), b, gates::sigma_minus());
                EXPECT_NEAR(pm.real(), 0.5 * zz, 1e-10);
                EXPECT_NEAR(pm.imag(), 0.0, 1e-10);
            }
        }
    }
}

TEST(HomogeneousSinglet, SmallSizes) {
    Rng rng(4);
    const HomogeneousSinglet h2 = homogeneous_singlet(2, rng);
    EXPECT_TRUE(equal_up_to_phase(h2.state, bell::psi_minus(), 1e-8));

    for (int n : {4, 6}) {
        const HomogeneousSinglet h = homogeneous_singlet(n, rng);
        EXPECT_LT(singlet_residual(h.state), 1e-8);
        EXPECT_LT(h.constraint_residual, 1e-8);
        const double mod = 1.0 / std::sqrt(static_cast<double>(binomial(n, n / 2)));
        for (std::size_t k = 0; k < h.state.dim(); ++k) {
            const double expect = 2 * popcount(k) == n ? mod : 0.0;
            EXPECT_NEAR(std::abs(h.state[k]), expect, 1e-8);
        }
    }
}

TEST(HomogeneousSinglet, WeightThreeConstraintAndUniformCorrelation) {
    Rng rng(5);
    const StateVector h = homogeneous_singlet(4, rng).state;
    // Amplitudes feeding 1110 under S^- must cancel.
    const cplx sum = h.amp("0110") + h.amp("1010") + h.amp("1100");
    EXPECT_NEAR(std::abs(sum), 0.0, 1e-8);
    for (int q = 2; q <= 4; ++q) {
        EXPECT_NEAR(expectation(h, PauliString::pair(4, 1, Pauli::Z, q, Pauli::Z)), -1.0 / 3.0, 1e-8);
    }
}

TEST(HomogeneousSinglet, EightQubitsReportsSolverFailure) {
    Rng rng(6);
    HomogeneousOptions opt;
    opt.restarts = 5;
    try {
        homogeneous_singlet(8, rng, opt);
        FAIL() << "expected SolverFailure";
    } catch (const SolverFailure &e) {
        EXPECT_GT(e.best_residual(), 1e-6);
    }
}
