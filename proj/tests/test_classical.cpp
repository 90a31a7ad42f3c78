#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rotorlab/classical.hpp"
#include "rotorlab/propagator.hpp"

using namespace rotorlab;

TEST(StandardMap, FixedPointAndFreeMotion) {
    const auto t = standard_map_step({0.0, 0.0, 1.0}, 3.0);
    EXPECT_DOUBLE_EQ(t.theta, 0.0);
    EXPECT_DOUBLE_EQ(t.L, 0.0);

    ClassicalTrajectory f{1.0, 0.3, 1.0};
    for (int i = 0; i < 5; ++i) f = standard_map_step(f, 0.0);
    EXPECT_DOUBLE_EQ(f.L, 0.3);
    EXPECT_NEAR(f.theta, 1.0 + 5 * 0.3, 1e-14);
}

TEST(StandardMap, SingleStep) {
    const auto t = standard_map_step({pi / 2, 0.0, 1.0}, 2.0);
    EXPECT_NEAR(t.L, 2.0, 1e-15);
    EXPECT_NEAR(t.theta, pi / 2 + 1.0, 1e-15);
    const auto w = standard_map_step({6.0, 1.0, 1.0}, 0.0);
    EXPECT_NEAR(w.theta, 7.0 - two_pi, 1e-14);
}

TEST(StandardMap, AreaPreserving) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 50; ++i)
        EXPECT_NEAR(map_jacobian_determinant(u(rng), u(rng), 2.5), 1.0, 1e-6);
}

TEST(WignerEnsemble, LinesAndWeights) {
    const SuperpositionSpec sp{2, -1, pi / 4, 0.0};
    const auto ens = wigner_ensemble(sp, 0.5, 300);
    ASSERT_EQ(ens.size(), 900u);
    for (const auto& t : ens.stratum(0)) {
        EXPECT_DOUBLE_EQ(t.L, 1.0);
        EXPECT_NEAR(t.weight, 0.5 / 300, 1e-17);
    }
    for (const auto& t : ens.stratum(1)) EXPECT_DOUBLE_EQ(t.L, -0.5);
    double x = 0.0;
    for (const auto& t : ens.stratum(2)) {
        EXPECT_DOUBLE_EQ(t.L, 0.25);
        x += t.weight;
    }
    EXPECT_NEAR(x, 0.0, 1e-14);
    EXPECT_NEAR(ens.total_weight(), 1.0, 1e-13);
    EXPECT_NEAR(ensemble_energy(ens), 0.3125, 1e-14);
}

TEST(WignerEnsemble, BetaFlipsInterferenceSign) {
    const SuperpositionSpec sp{1, 2, pi / 4, 0.0};
    const auto a = wigner_ensemble(sp, 1.0, 200);
    const auto b = wigner_ensemble(sp.with_beta(pi), 1.0, 200);
    const auto sa = a.stratum(2), sb = b.stratum(2);
    for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_NEAR(sa[i].weight, -sb[i].weight, 1e-15);
    // first interference sample sits at theta = 0: weight sin(2a) cos(beta) / S
    EXPECT_NEAR(sa[0].weight, 1.0 / 200, 1e-15);
}

TEST(WignerEnsemble, Rejections) {
    EXPECT_THROW(wigner_ensemble({1, 2, pi / 4, 0.0, BasisKind::sine_parity}, 1.0, 1000), std::invalid_argument);
    EXPECT_THROW(wigner_ensemble({2, -1}, 0.5, 299), std::invalid_argument);
    EXPECT_NO_THROW(wigner_ensemble({2, -1}, 0.5, 300));
    EXPECT_THROW(wigner_ensemble({2, -1}, 0.0, 300), std::invalid_argument);
}

TEST(Ensemble, ZeroKickStrengthKeepsEnergy) {
    auto ens = wigner_ensemble({2, -1, pi / 4, pi}, 0.5, 1000);
    const auto s = propagate_ensemble(ens, 0.0, 20);
    for (double e : s.energies()) EXPECT_NEAR(e, 0.3125, 1e-13);
}

TEST(Ensemble, WeightsConserved) {
    auto ens = wigner_ensemble({1, 2, pi / 4, pi}, 1.0, 1000);
    std::vector<double> w0;
    for (const auto& t : ens.trajectories()) w0.push_back(t.weight);
    propagate_ensemble(ens, 5.0, 30);
    for (std::size_t i = 0; i < w0.size(); ++i) EXPECT_EQ(ens.trajectories()[i].weight, w0[i]);
}

TEST(Ensemble, ChaoticDiffusionRate) {
    // Large uniform ensemble at kappa = 5: energy grows at roughly kappa^2/4 per kick.
    const double kappa = 5.0;
    const int n = 40000;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    std::vector<ClassicalTrajectory> traj;
    for (int i = 0; i < n; ++i) traj.push_back({u(rng), 0.0, 1.0 / n});
    ClassicalEnsemble ens(std::move(traj), {});
    const auto s = propagate_ensemble(ens, kappa, 60);
    const double slope = (s.energy(60) - s.energy(20)) / 40.0;
    EXPECT_NEAR(slope, kappa * kappa / 4, 0.25 * kappa * kappa / 4);
}

TEST(Ensemble, RegularRegimeIsBounded) {
    std::vector<ClassicalTrajectory> traj;
    for (int i = 0; i < 200; ++i) traj.push_back({two_pi * i / 200, 0.0, 1.0 / 200});
    ClassicalEnsemble ens(std::move(traj), {});
    propagate_ensemble(ens, 0.5, 2000);
    for (const auto& t : ens.trajectories()) EXPECT_LT(std::abs(t.L), 2.0);
}

TEST(Ensemble, ShortTimeAgreementWithQuantum) {
    for (auto [sp, tau] : {std::pair{SuperpositionSpec{2, -1, pi / 4, 0.0}, 0.5},
                           std::pair{SuperpositionSpec{2, -1, pi / 4, pi}, 0.5},
                           std::pair{SuperpositionSpec{1, 2, pi / 4, 0.0}, 1.0},
                           std::pair{SuperpositionSpec{1, 2, pi / 4, pi}, 1.0}}) {
        const double k = 5.0;
        const PropagatorPlan plan(SimulationParams(tau, k, 256, 2));
        const auto q = propagate(prepare_superposition(sp, 256), plan, 2);
        const auto c = propagate_ensemble(wigner_ensemble(sp, tau, 20000), tau * k, 2);
        EXPECT_NEAR(c.energy(1), q.energy(1), 1e-8 * q.energy(1));
        EXPECT_NEAR(c.energy(2), q.energy(2), 0.10 * q.energy(2));
    }
}
