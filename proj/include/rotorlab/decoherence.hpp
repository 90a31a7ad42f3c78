// decoherence.hpp
// Random-phase decoherence: each period is R F with R|m> = e^{i 2 pi r xi(m,N)}|m>,
// xi uniform on [0,1) and fresh for every (m, N). The density matrix is the average
// over independent noise realizations; purity is S = Tr rho^2.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rotorlab/core_state.hpp"
#include "rotorlab/propagator.hpp"

namespace rotorlab {

struct DecoherenceConfig {
    double r = 0.0;
    int n_realizations = 100;
    std::uint64_t seed = 0;
    int entropy_every = 1;  // 0 disables purity snapshots

    void validate() const {
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("decoherence strength r must lie in [0, 1]");
        if (n_realizations < 1) throw std::invalid_argument("n_realizations must be >= 1");
        if (entropy_every < 0) throw std::invalid_argument("entropy_every must be >= 0");
        if (entropy_every > 0 && n_realizations < 2)
            throw std::invalid_argument("linear entropy needs n_realizations >= 2");
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Counter-based uniform stream: xi(m, kick) depends only on (seed, realization, kick, m),
// never on evaluation order.
class PhaseStream {
public:
    PhaseStream(std::uint64_t seed, std::uint64_t realization)
        : key_(detail::splitmix64(detail::splitmix64(seed) ^ (realization * 0xd6e8feb86659fd93ULL))) {}

    double uniform(int kick, int m) const {
        std::uint64_t h = detail::splitmix64(key_ ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(kick)));
        h = detail::splitmix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(m)) << 32));
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
};

inline AngularState random_phase_step(AngularState state, double r, const PhaseStream& stream, int kick) {
    if (r == 0.0) return state;
    auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const int m = state.m_of(static_cast<int>(i));
        amps[i] *= std::polar(1.0, two_pi * r * stream.uniform(kick, m));
    }
    return state;
}

struct RealizationEnsemble {
    std::vector<AngularState> states;
    int kick_index = 0;
};

// (1/R^2) sum_{i,j} |<psi_i|psi_j>|^2 = Tr rho^2 for rho = (1/R) sum_i |psi_i><psi_i|.
inline double linear_entropy(const RealizationEnsemble& ens) {
    const std::size_t R = ens.states.size();
    if (R == 0) throw std::invalid_argument("linear entropy of an empty ensemble");
    double acc = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
        acc += std::norm(overlap(ens.states[i], ens.states[i]));
        for (std::size_t j = i + 1; j < R; ++j) acc += 2.0 * std::norm(overlap(ens.states[i], ens.states[j]));
    }
    return acc / (static_cast<double>(R) * static_cast<double>(R));
}

// Mean scaled energy over the ensemble.
inline double mean_energy(const RealizationEnsemble& ens, double tau) {
    double acc = 0.0;
    for (const auto& s : ens.states) acc += scaled_energy(s, tau);
    return acc / static_cast<double>(ens.states.size());
}

// One period R F for every realization. Realization i draws from PhaseStream(seed, i);
// the kick label is the index of the period being completed (1 for the first).
inline void advance_realizations(RealizationEnsemble& ens, const PropagatorPlan& plan, const DecoherenceConfig& config) {
    const int kick = ens.kick_index + 1;
    for (std::size_t i = 0; i < ens.states.size(); ++i) {
        const PhaseStream stream(config.seed, i);
        ens.states[i] = random_phase_step(floquet_step(std::move(ens.states[i]), plan), config.r, stream, kick);
    }
    ens.kick_index = kick;
}

// Realization-averaged evolution for plan.params().kicks() periods. Purity is recorded
// at kick 0, at every multiple of entropy_every and at the final kick.
inline ObservableSeries propagate_with_decoherence(const SuperpositionSpec& spec, const PropagatorPlan& plan,
                                                   const DecoherenceConfig& config,
                                                   RealizationEnsemble* final_ensemble = nullptr) {
    config.validate();
    const int n_kicks = plan.params().kicks();
    const double tau = plan.params().tau();
    const AngularState initial = prepare_superposition(spec, plan.dim());
    RealizationEnsemble ens{std::vector<AngularState>(static_cast<std::size_t>(config.n_realizations), initial), 0};

    ObservableSeries series;
    for (;;) {
        const int kick = ens.kick_index;
        const bool want_purity =
            config.entropy_every > 0 && (kick % config.entropy_every == 0 || kick == n_kicks);
        std::optional<double> purity;
        if (want_purity) purity = std::min(1.0, linear_entropy(ens));
        series.push(kick, mean_energy(ens, tau), purity);
        if (kick == n_kicks) break;
        advance_realizations(ens, plan, config);
    }
    if (final_ensemble) *final_ensemble = std::move(ens);
    return series;
}

}  // namespace rotorlab
