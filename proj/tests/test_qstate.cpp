#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qcs/protocol.hpp"
#include "qcs/purify.hpp"
#include "qcs/qstate.hpp"
#include "qcs/spin.hpp"

using namespace qcs;

namespace {

StateVector random_state(int n, Rng &rng) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(std::size_t{1} << n));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        v(k) = cplx(rng.normal(), rng.normal());
    }
    return StateVector(n, v / v.norm());
}

}  // namespace

TEST(BitOrder, QubitOneIsMostSignificant) {
    EXPECT_EQ(basis_label(3, 4), "0011");
    EXPECT_EQ(basis_index("1000"), 8u);
    EXPECT_EQ(qubit_bit(8, 4, 1), 1);
    EXPECT_EQ(qubit_bit(8, 4, 4), 0);
    const StateVector s = apply_single_qubit(StateVector(3), 1, gates::x());
    EXPECT_NEAR(std::abs(s.amp("100")), 1.0, 1e-15);
}

TEST(StateVector, RejectsNonFiniteAndBadSizes) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(StateVector(2, v), InvariantViolation);
    EXPECT_THROW(StateVector(0), InvalidArgument);
    EXPECT_THROW(StateVector(13), InvalidArgument);
    EXPECT_THROW(StateVector(2, Eigen::VectorXcd::Zero(3)), InvalidArgument);
}

TEST(ApplySingleQubit, Examples) {
    Rng rng(1);
    const StateVector psi = random_state(3, rng);
    EXPECT_TRUE(equal_up_to_phase(apply_single_qubit(psi, 2, gates::identity()), psi));

    const StateVector one = apply_single_qubit(StateVector(1), 1, gates::x());
    EXPECT_NEAR(std::abs(one[1]), 1.0, 1e-15);

    const StateVector r = apply_single_qubit(bell::psi_minus(), 1, gates::z_rotation(std::numbers::pi));
    EXPECT_NEAR(expectation(r, PauliString("ZZ")), -1.0, 1e-12);
}

TEST(ApplySingleQubit, Errors) {
    Mat2 bad = gates::x();
    bad(0, 1) = 2.0;
    EXPECT_THROW(apply_single_qubit(StateVector(2), 1, bad), InvalidArgument);
    EXPECT_THROW(apply_single_qubit(StateVector(2), 3, gates::x()), InvalidArgument);
    EXPECT_THROW(apply_single_qubit(StateVector(2), 0, gates::x()), InvalidArgument);
}

TEST(ApplySingleQubit, PreservesNorm) {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const StateVector psi = random_state(5, rng);
        const StateVector out = apply_single_qubit(psi, 1 + trial % 5, gates::random_unitary(rng));
        EXPECT_NEAR(out.norm_squared(), 1.0, 1e-10);
    }
}

TEST(ApplyGlobalRotation, SupersingletInvariantUnderRandomRotations) {
    Rng rng(3);
    const StateVector s = supersinglet(4);
    for (int trial = 0; trial < 20; ++trial) {
        EXPECT_NEAR(overlap_modulus(apply_global_rotation(s, gates::random_unitary(rng)), s), 1.0, 1e-10);
    }
}

TEST(ApplyGlobalRotation, HadamardMapsZerosToPluses) {
    const StateVector out = apply_global_rotation(StateVector(2), gates::hadamard());
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(out[k].real(), 0.5, 1e-15);
    }
    EXPECT_NEAR(expectation(out, PauliString("XI")), 1.0, 1e-12);
    EXPECT_NEAR(expectation(out, PauliString("IX")), 1.0, 1e-12);
}

TEST(ApplyGlobalRotation, DickeIsZEigenstate) {
    const StateVector d = dicke_state({2, 1});
    EXPECT_NEAR(overlap_modulus(apply_global_rotation(d, gates::z()), d), 1.0, 1e-12);
}

TEST(Expectation, SingletExamples) {
    const StateVector s = supersinglet(4);
    for (int q = 1; q <= 4; ++q) {
        for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
            EXPECT_NEAR(expectation(s, PauliString::single(4, q, p)), 0.0, 1e-12);
        }
    }
    EXPECT_NEAR(expectation(s, PauliString::pair(4, 2, Pauli::X, 3, Pauli::Z)), 0.0, 1e-12);
    EXPECT_NEAR(expectation(s, PauliString("ZZII")), 1.0 / 3.0, 1e-12);
}

TEST(Expectation, DensityMatrixAgreesWithPure) {
    Rng rng(4);
    const StateVector psi = random_state(3, rng);
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    for (const char *p : {"XYZ", "ZIZ", "YYI", "IXI"}) {
        EXPECT_NEAR(expectation(rho, PauliString(p)), expectation(psi, PauliString(p)), 1e-12) << p;
    }
}

TEST(Expectation, DimensionMismatchThrows) {
    EXPECT_THROW(expectation(StateVector(2), PauliString("ZZZ")), InvalidArgument);
}

TEST(PartialTrace, Examples) {
    const DensityMatrix r1 = partial_trace(DensityMatrix::from_pure(bell::psi_minus()), {1});
    EXPECT_NEAR((r1.elems() - Eigen::Matrix2cd::Identity() / 2.0).cwiseAbs().maxCoeff(), 0.0, 1e-12);

    const DensityMatrix r12 = partial_trace(supersinglet(4), {1, 2});
    const WernerFit fit = werner_fit(r12);
    EXPECT_NEAR(fit.x, -1.0 / 3.0, 1e-12);
    EXPECT_LT(fit.residual, 1e-12);

    // (1/3) sum_k |D_k><D_k| on the first half.
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
    for (int k = 0; k <= 2; ++k) {
        const Eigen::VectorXcd d = oracle::dicke_by_lowering(2, k);
        expect += d * d.adjoint() / 3.0;
    }
    EXPECT_NEAR((r12.elems() - expect).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(PartialTrace, Properties) {
    Rng rng(5);
    const StateVector psi = random_state(4, rng);
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    EXPECT_NEAR((partial_trace(rho, {1, 2, 3, 4}).elems() - rho.elems()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    for (std::vector<int> keep : {std::vector<int>{2}, {1, 3}, {4, 2}, {1, 2, 4}}) {
        const DensityMatrix r = partial_trace(rho, keep);
        EXPECT_NEAR(r.trace().real(), 1.0, 1e-10);
        EXPECT_TRUE(r.is_valid());
        const DensityMatrix r2 = partial_trace(psi, keep);
        EXPECT_NEAR((r.elems() - r2.elems()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    }
    EXPECT_THROW(partial_trace(rho, {}), InvalidArgument);
    EXPECT_THROW(partial_trace(rho, {5}), InvalidArgument);
}

TEST(Project, Examples) {
    const Basis bx = Basis::x();
    EXPECT_NEAR(project(supersinglet(4), 1, bx.plus).prob, 0.5, 1e-12);
    EXPECT_NEAR(project(bell::psi_minus(), 1, bx.plus).prob, 0.5, 1e-12);
    EXPECT_NEAR(project(StateVector(3), 1, Basis::z().minus).prob, 0.0, 1e-15);
    EXPECT_THROW(project_normalized(StateVector(3), 1, Basis::z().minus), InvalidArgument);
    EXPECT_THROW(project(StateVector(1), 1, Vec2(1.0, 1.0)), InvalidArgument);
}

TEST(Project, SupersingletZeroBranch) {
    // sqrt(4/(N+2)) sum_k (-1)^(N/2-k) sqrt((N-2k)/N) |0>|D_k^(N/2-1)>|D_(N/2-k)^(N/2)>
    for (int n : {4, 6}) {
        const int h = n / 2;
        const Projection p = project(supersinglet(n), 1, Basis::z().plus);
        EXPECT_NEAR(p.prob, 0.5, 1e-12);
        const StateVector post(n, p.post.amps() / std::sqrt(p.prob));
        Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(post.dim()));
        for (int k = 0; k <= h - 1; ++k) {
            const double c = std::sqrt(4.0 / (n + 2)) * ((h - k) % 2 ? -1.0 : 1.0) * std::sqrt((n - 2.0 * k) / n);
            const StateVector first = tensor(StateVector(1), StateVector(h - 1, oracle::dicke_by_lowering(h - 1, k)));
            const StateVector second(h, oracle::dicke_by_lowering(h, h - k));
            expect += c * tensor(first, second).amps();
        }
        EXPECT_TRUE(equal_up_to_phase(post, StateVector(n, expect))) << n;
        for (int q = 2; q <= n; ++q) {
            EXPECT_NEAR(expectation(post, PauliString::single(n, q, Pauli::Z)), oracle::amplitude(q, n), 1e-12);
        }
    }
}

TEST(Project, BranchesSumToOne) {
    Rng rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector psi = random_state(3, rng);
        for (const Basis &b : {Basis::x(), Basis::y(), Basis::z()}) {
            EXPECT_NEAR(project(psi, 2, b.plus).prob + project(psi, 2, b.minus).prob, 1.0, 1e-10);
        }
    }
}

TEST(Measure, PlusStateAlwaysPlus) {
    Rng rng(7);
    const StateVector plus = apply_single_qubit(StateVector(1), 1, gates::hadamard());
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(measure(plus, 1, Basis::x(), rng).outcome, +1);
    }
}

TEST(Measure, SeededSequencesRepeat) {
    const StateVector s = supersinglet(4);
    Rng a(42), b(42);
    for (int i = 0; i < 200; ++i) {
        EXPECT_EQ(measure(s, 1, Basis::x(), a).outcome, measure(s, 1, Basis::x(), b).outcome);
    }
}

TEST(Measure, AliceFrequencyIsHalf) {
    Rng rng(8);
    const StateVector s = supersinglet(4);
    int plus = 0;
    const int shots = 10000;
    for (int i = 0; i < shots; ++i) {
        plus += measure(s, 1, Basis::x(), rng).outcome == 1;
    }
    EXPECT_NEAR(static_cast<double>(plus) / shots, 0.5, 0.02);
}

TEST(Evolve, SingletUnaffected) {
    const StateVector s = supersinglet(6);
    for (double t : {0.1, 1.0, 7.3}) {
        EXPECT_NEAR(overlap_modulus(evolve(s, t, 1.3), s), 1.0, 1e-12);
    }
    Rng rng(9);
    const StateVector psi = random_state(3, rng);
    EXPECT_NEAR((evolve(psi, 0.0, 2.0).amps() - psi.amps()).norm(), 0.0, 1e-15);
}

TEST(Evolve, HeisenbergIdentity) {
    Rng rng(10);
    std::vector<StateVector> states{random_state(3, rng), random_state(3, rng),
                                    apply_global_rotation(StateVector(3), gates::random_unitary(rng))};
    for (const auto &psi : states) {
        for (double wt : {0.3, 1.1, 2.9}) {
            for (int q = 1; q <= 3; ++q) {
                const double x0 = expectation(psi, PauliString::single(3, q, Pauli::X));
                const double y0 = expectation(psi, PauliString::single(3, q, Pauli::Y));
                const double xt = expectation(evolve(psi, wt, 1.0), PauliString::single(3, q, Pauli::X));
                EXPECT_NEAR(xt, std::cos(wt) * x0 - std::sin(wt) * y0, 1e-10);
            }
        }
    }
}

TEST(Evolve, PostMeasurementSignal) {
    const StateVector s = supersinglet(4);
    const StateVector psi0 = project_normalized(s, 1, Basis::x().plus);
    for (double wt : {0.0, 0.7, 2.0}) {
        const StateVector psi = evolve(psi0, wt, 1.0);
        for (int n = 2; n <= 4; ++n) {
            EXPECT_NEAR(expectation(psi, PauliString::single(4, n, Pauli::X)), oracle::amplitude(n, 4) * std::cos(wt),
                        1e-12);
        }
    }
}

TEST(DensityMatrix, Validation) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    EXPECT_FALSE(DensityMatrix(1, m).is_valid());
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    EXPECT_FALSE(DensityMatrix(1, m).is_valid());
    EXPECT_TRUE(DensityMatrix::maximally_mixed(3).is_valid());
}

TEST(Json, RoundTripIsExact) {
    Rng rng(11);
    const StateVector psi = random_state(3, rng);
    const StateVector back = state_from_json(nlohmann::json::parse(to_json(psi).dump()));
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        EXPECT_EQ(back[k], psi[k]);
    }
}
