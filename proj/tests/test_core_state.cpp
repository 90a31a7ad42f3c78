#include <gtest/gtest.h>

#include <cmath>

#include "rotorlab/core_state.hpp"

using namespace rotorlab;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST(SimulationParams, RejectsBadInputs) {
    EXPECT_THROW(SimulationParams(0.0, 5.0, 256, 10), std::invalid_argument);
    EXPECT_THROW(SimulationParams(-1.0, 5.0, 256, 10), std::invalid_argument);
    EXPECT_THROW(SimulationParams(0.5, -1.0, 256, 10), std::invalid_argument);
    EXPECT_THROW(SimulationParams(0.5, 5.0, 255, 10), std::invalid_argument);
    EXPECT_THROW(SimulationParams(0.5, 5.0, 256, -1), std::invalid_argument);
    const SimulationParams p(0.5, 5.0, 256, 60);
    EXPECT_DOUBLE_EQ(p.kappa(), 2.5);
    EXPECT_EQ(p.with_basis(512).n_basis(), 512);
    EXPECT_EQ(p.with_kicks(3).kicks(), 3);
}

TEST(AngularState, IndexBijection) {
    AngularState s(8);
    EXPECT_EQ(s.m_min(), -4);
    EXPECT_EQ(s.m_max(), 3);
    for (int m = -4; m <= 3; ++m) EXPECT_EQ(s.m_of(s.index_of(m)), m);
    EXPECT_THROW(s.index_of(4), std::out_of_range);
    EXPECT_THROW(AngularState(7), std::invalid_argument);
}

TEST(Prepare, CaseAPlus) {
    const auto s = prepare_superposition({2, -1, pi / 4, 0.0}, 256);
    EXPECT_NEAR(std::abs(s.amplitude(2) - r2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.amplitude(-1) - r2), 0.0, 1e-15);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);
    EXPECT_NEAR(scaled_energy(s, 0.5), 0.3125, 1e-14);
}

TEST(Prepare, CaseBMinus) {
    const auto s = prepare_superposition({1, 2, pi / 4, pi}, 256);
    EXPECT_NEAR(std::abs(s.amplitude(1) - r2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.amplitude(2) + r2), 0.0, 1e-15);
    EXPECT_NEAR(scaled_energy(s, 1.0), 1.25, 1e-14);
}

TEST(Prepare, EnergyIsBlindToBeta) {
    for (double beta : {0.0, 0.7, pi, 5.0}) {
        const auto s = prepare_superposition({2, -1, pi / 4, beta}, 64);
        EXPECT_NEAR(scaled_energy(s, 0.5), 0.3125, 1e-14);
    }
}

TEST(Prepare, BasisStateEnergy) {
    EXPECT_NEAR(scaled_energy(AngularState::basis(64, 2), 0.5), 0.5, 1e-15);
    const auto s = prepare_superposition({2, -1, 0.0, 0.0}, 64);
    EXPECT_NEAR(std::norm(s.amplitude(2)), 1.0, 1e-15);
    EXPECT_NEAR(std::norm(s.amplitude(-1)), 0.0, 1e-30);
}

TEST(Prepare, ParityStates) {
    SuperpositionSpec sp{1, 2, pi / 2, 0.0, BasisKind::sine_parity};
    const auto s = prepare_superposition(sp, 16);
    EXPECT_NEAR(std::abs(s.amplitude(2) - cplx(0, -r2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s.amplitude(-2) - cplx(0, r2)), 0.0, 1e-15);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-15);

    sp.basis_kind = BasisKind::cosine_parity;
    sp.alpha = pi / 4;
    const auto c = prepare_superposition(sp, 16);
    EXPECT_NEAR(c.norm_squared(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(c.amplitude(1) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.amplitude(-2) - 0.5), 0.0, 1e-15);
    EXPECT_EQ(to_string(BasisKind::sine_parity), "sine");
}

TEST(Prepare, Errors) {
    EXPECT_THROW(prepare_superposition({1, 1}, 16), std::invalid_argument);
    EXPECT_THROW(prepare_superposition({1, 20}, 16), std::out_of_range);
    EXPECT_THROW(prepare_superposition({0, 2, pi / 4, 0.0, BasisKind::sine_parity}, 16), std::invalid_argument);
    EXPECT_THROW(prepare_superposition({1, 2, 2.0, 0.0}, 16), std::invalid_argument);
    EXPECT_THROW(prepare_superposition({1, 2, pi / 4, two_pi}, 16), std::invalid_argument);
}

TEST(Observables, TailAndDistribution) {
    AngularState s(32);
    s.amplitude(-12) = std::sqrt(0.25);
    s.amplitude(3) = std::sqrt(0.5);
    s.amplitude(10) = std::sqrt(0.25);
    const auto p = momentum_distribution(s);
    EXPECT_NEAR(p[static_cast<std::size_t>(s.index_of(3))], 0.5, 1e-15);
    EXPECT_NEAR(tail_probability(p, 10), 0.5, 1e-15);
    EXPECT_NEAR(tail_probability(p, 11), 0.25, 1e-15);
    EXPECT_NEAR(tail_probability(p, 0), 1.0, 1e-15);
}

TEST(Observables, Overlap) {
    const auto a = prepare_superposition({2, -1, pi / 4, 0.0}, 32);
    const auto b = prepare_superposition({2, -1, pi / 4, pi}, 32);
    EXPECT_NEAR(std::abs(overlap(a, b)), 0.0, 1e-15);
    EXPECT_NEAR(overlap(a, a).real(), 1.0, 1e-15);
    EXPECT_THROW(overlap(a, AngularState(16)), std::invalid_argument);
}

TEST(ObservableSeries, KickOrderAndPurity) {
    ObservableSeries s;
    s.push(0, 1.0, 1.0);
    s.push(1, 2.0);
    EXPECT_THROW(s.push(3, 1.0), std::logic_error);
    EXPECT_THROW(s.push(2, 1.0, 0.0), std::logic_error);
    EXPECT_THROW(s.push(2, 1.0, 1.5), std::logic_error);
    EXPECT_EQ(s.last_kick(), 1);
    EXPECT_DOUBLE_EQ(s.energy(1), 2.0);
    EXPECT_FALSE(s.purity(1).has_value());
}

TEST(WrapAngle, Range) {
    for (double t : {-7.0, -0.1, 0.0, 3.0, 6.3, 100.0}) {
        const double w = wrap_angle(t);
        EXPECT_GE(w, 0.0);
        EXPECT_LT(w, two_pi);
        EXPECT_NEAR(std::remainder(w - t, two_pi), 0.0, 1e-12);
    }
}
