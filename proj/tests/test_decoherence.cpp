#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "rotorlab/decoherence.hpp"

using namespace rotorlab;

namespace {

const SuperpositionSpec case_b{1, 2, pi / 4, pi};

}  // namespace

TEST(Decoherence, ZeroStrengthIsCoherent) {
    const SimulationParams p(1.0, 5.0, 256, 20);
    const PropagatorPlan plan(p);
    const auto noisy = propagate_with_decoherence(case_b, plan, {0.0, 4, 1, 1});
    const auto clean = propagate(prepare_superposition(case_b, 256), plan, 20);
    for (int n = 0; n <= 20; ++n) {
        EXPECT_NEAR(noisy.energy(n), clean.energy(n), 1e-12 * clean.energy(n));
        EXPECT_NEAR(*noisy.purity(n), 1.0, 1e-12);
    }
}

TEST(Decoherence, PhaseStepKeepsPopulations) {
    const auto s = prepare_superposition({3, -2, 0.3, 1.0}, 32);
    const auto t = random_phase_step(s, 1.0, PhaseStream(5, 2), 7);
    for (int m = -16; m < 16; ++m) EXPECT_NEAR(std::abs(t.amplitude(m)), std::abs(s.amplitude(m)), 1e-15);
    EXPECT_NE(t.amplitude(3), s.amplitude(3));
}

TEST(Decoherence, PhaseStreamIsCounterBased) {
    const PhaseStream a(42, 3), b(42, 3), c(42, 4);
    EXPECT_EQ(a.uniform(5, -7), b.uniform(5, -7));
    EXPECT_NE(a.uniform(5, -7), c.uniform(5, -7));
    EXPECT_NE(a.uniform(5, -7), a.uniform(6, -7));
    double mean = 0.0;
    for (int m = 0; m < 10000; ++m) {
        const double x = a.uniform(1, m);
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
        mean += x / 10000;
    }
    EXPECT_NEAR(mean, 0.5, 0.01);
}

TEST(LinearEntropy, Limits) {
    const auto s = AngularState::basis(16, 1);
    EXPECT_NEAR(linear_entropy({{s, s, s}, 0}), 1.0, 1e-15);
    EXPECT_NEAR(linear_entropy({{AngularState::basis(16, 0), AngularState::basis(16, 1),
                                 AngularState::basis(16, 2), AngularState::basis(16, 3)}, 0}),
                0.25, 1e-15);
    EXPECT_THROW(linear_entropy({}), std::invalid_argument);
}

TEST(LinearEntropy, MatchesDensityMatrix) {
    const int d = 64;
    const PropagatorPlan plan(SimulationParams(1.0, 1.0, d, 0));
    const DecoherenceConfig cfg{0.3, 6, 9, 1};
    RealizationEnsemble ens{std::vector<AngularState>(6, prepare_superposition({1, 2}, d)), 0};
    for (int i = 0; i < 3; ++i) advance_realizations(ens, plan, cfg);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& st : ens.states) {
        const Eigen::Map<const Eigen::VectorXcd> v(st.amplitudes().data(), d);
        rho += v * v.adjoint() / 6.0;
    }
    EXPECT_NEAR(linear_entropy(ens), (rho * rho).trace().real(), 1e-13);
}

TEST(Decoherence, SeededRunsAreReproducible) {
    const PropagatorPlan plan(SimulationParams(1.0, 5.0, 256, 15));
    const DecoherenceConfig cfg{0.15, 8, 77, 5};
    RealizationEnsemble e1, e2;
    const auto a = propagate_with_decoherence(case_b, plan, cfg, &e1);
    const auto b = propagate_with_decoherence(case_b, plan, cfg, &e2);
    EXPECT_EQ(a.energies(), b.energies());
    for (std::size_t i = 0; i < e1.states.size(); ++i) {
        EXPECT_TRUE(std::equal(e1.states[i].amplitudes().begin(), e1.states[i].amplitudes().end(),
                               e2.states[i].amplitudes().begin()));
        EXPECT_NEAR(e1.states[i].norm_squared(), 1.0, 1e-12);
    }
    EXPECT_TRUE(a.purity(5).has_value());
    EXPECT_FALSE(a.purity(6).has_value());
    EXPECT_TRUE(a.purity(15).has_value());
    const auto c = propagate_with_decoherence(case_b, plan, {0.15, 8, 78, 5});
    EXPECT_NE(a.energy(15), c.energy(15));
}

TEST(Decoherence, FullStrengthKillsCoherences) {
    // r = 1 draws uniform phases on [0, 2pi): off-diagonal rho elements average to zero,
    // so with many realizations Tr rho^2 -> sum_m P(m)^2 after one kick of free motion.
    const int d = 16;
    const PropagatorPlan plan(SimulationParams(1.0, 0.0, d, 1));
    const int R = 4000;
    const auto sp = SuperpositionSpec{1, -3, pi / 4, 0.0};
    const auto series = propagate_with_decoherence(sp, plan, {1.0, R, 3, 1});
    const double diag = 0.25 + 0.25;
    EXPECT_NEAR(*series.purity(1), diag + (1.0 - diag) / R, 0.02);
}

TEST(Decoherence, PurityDecreasesWithStrength) {
    const PropagatorPlan plan(SimulationParams(1.0, 5.0, 512, 30));
    double prev = 1.1;
    for (double r : {0.0, 0.05, 0.15, 0.5}) {
        const double s = *propagate_with_decoherence(case_b, plan, {r, 20, 1, 30}).purity(30);
        EXPECT_LT(s, prev) << "r=" << r;
        prev = s;
    }
}

TEST(Decoherence, ConfigValidation) {
    EXPECT_THROW((DecoherenceConfig{1.5, 10, 0, 1}.validate()), std::invalid_argument);
    EXPECT_THROW((DecoherenceConfig{0.1, 1, 0, 1}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((DecoherenceConfig{0.1, 1, 0, 0}.validate()));
}
