#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qcs/optimize.hpp"
#include "qcs/purify.hpp"

using namespace qcs;

namespace {

constexpr double kPi = std::numbers::pi;
const double kN4Target = std::cbrt(4.0 / 27.0);

}  // namespace

TEST(Objective, Examples) {
    EXPECT_NEAR(objective_geomean(supersinglet(4)), kN4Target, 1e-12);
    EXPECT_NEAR(objective_geomean(supersinglet(4)), 0.529134, 1e-6);
    EXPECT_NEAR(objective_geomean(supersinglet(6)), 0.452885, 1e-6);
    EXPECT_NEAR(objective_geomean(bell_pair_product()), 0.0, 1e-9);
    Rng rng(1);
    const HomogeneousSinglet h = homogeneous_singlet(4, rng);
    EXPECT_NEAR(objective_geomean(h.state), 1.0 / 3.0, 1e-9);
}

TEST(Objective, GlobalRotationInvariance) {
    Rng rng(2);
    const StateVector s = random_singlet(6, rng);
    const double f = objective_geomean(s);
    for (int i = 0; i < 20; ++i) {
        EXPECT_NEAR(objective_geomean(apply_global_rotation(s, gates::random_unitary(rng))), f, 1e-10);
    }
}

TEST(Scan, Examples) {
    const ScanResult r = scan_n4(64, 64);
    ASSERT_EQ(r.points.size(), 64u * 64u);
    EXPECT_NEAR(r.best, kN4Target, 1e-12);
    ASSERT_FALSE(r.argmax.empty());
    EXPECT_NEAR(r.argmax.front().theta, kPi / 2, 1e-12);
    for (const auto &p : r.argmax) {
        EXPECT_NEAR(p.theta, kPi / 2, 1e-12);
    }
    for (int j = 0; j < 64; ++j) {
        EXPECT_NEAR(r.at(0, j).objective, 0.0, 1e-9);
    }
    EXPECT_NEAR(overlap_modulus(scan_state(kPi / 2, 0.7), supersinglet(4)), 1.0, 1e-12);
    EXPECT_THROW(scan_n4(4, 64), InvalidArgument);
}

TEST(Scan, SecondaryMaximaArePermutedSupersinglets) {
    const ScanResult r = scan_n4(64, 64);
    bool found = false;
    for (const auto &p : r.local_maxima) {
        if (std::abs(p.theta - kPi / 2) < 1e-12 || p.objective < 0.5) {
            continue;
        }
        found = true;
        EXPECT_GT(p.objective, 0.52);
        EXPECT_GT(max_permuted_supersinglet_overlap(scan_state(p.theta, p.phi)), 0.999);
        EXPECT_TRUE(std::abs(p.theta - kPi / 6) < 0.05 || std::abs(p.theta - 5 * kPi / 6) < 0.05) << p.theta;
    }
    EXPECT_TRUE(found);
}

TEST(Scan, Csv) {
    std::ostringstream os;
    write_csv(os, scan_n4(8, 8));
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "theta,phi,objective");
}

TEST(Optimizer, ReachesSupersingletValue) {
    Rng rng(3);
    const OptimizeResult r4 = optimize_singlet(4, 8, rng);
    EXPECT_NEAR(r4.objective, kN4Target, 1e-6);
    EXPECT_TRUE(is_singlet(r4.state, 1e-8));
    const OptimizeResult r6 = optimize_singlet(6, 8, rng);
    EXPECT_NEAR(r6.objective, objective_geomean(supersinglet(6)), 1e-6);
}

TEST(Optimizer, NeverExceedsSupersinglet) {
    Rng rng(4);
    const OptimizeResult r = optimize_singlet(4, 20, rng);
    for (double v : r.restart_objectives) {
        EXPECT_LE(v, kN4Target + 1e-6);
    }
}

TEST(Optimizer, OptimumReducedStatesAreWerner) {
    Rng rng(5);
    const OptimizeResult r = optimize_singlet(4, 8, rng);
    const AmplitudeTable a = amplitude_correlation(r.state);
    for (int q = 2; q <= 4; ++q) {
        const WernerFit fit = werner_fit(partial_trace(r.state, {1, q}));
        EXPECT_NEAR(fit.x, -a.at(q), 1e-6) << q;
        EXPECT_LT(fit.residual, 1e-6);
    }
}

TEST(Optimizer, Errors) {
    Rng rng(6);
    EXPECT_THROW(optimize_singlet(8, 1, rng), InvalidArgument);
    EXPECT_THROW(optimize_singlet(4, 0, rng), InvalidArgument);
    OptimizeOptions tight;
    tight.max_evaluations = 10;
    EXPECT_THROW(optimize_singlet(4, 1, rng, tight), SolverFailure);
}

TEST(AmplitudeBound, RandomSinglets) {
    Rng rng(7);
    for (int n : {4, 6}) {
        const SingletBasis basis = singlet_subspace(n);
        for (int i = 0; i < 500; ++i) {
            const BoundReport b = amplitude_bound_check(random_singlet(basis, rng));
            EXPECT_GE(b.upper_margin, -1e-9);
            EXPECT_GE(b.lower_margin, -1e-9);
        }
    }
    EXPECT_NEAR(amplitude_bound_check(supersinglet(4)).upper_margin, 0.0, 1e-12);
    EXPECT_NEAR(amplitude_bound_check(bell::psi_minus()).lower_margin, 0.0, 1e-12);
}
