#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotorlab/core_state.hpp"
#include "rotorlab/decoherence.hpp"

namespace rotorlab::experiments {

enum class Mode { quantum, classical, spectral, decoherence };

inline std::string to_string(Mode m) {
    switch (m) {
        case Mode::quantum: return "quantum";
        case Mode::classical: return "classical";
        case Mode::spectral: return "spectral";
        case Mode::decoherence: return "decoherence";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s) {
    if (s == "quantum") return Mode::quantum;
    if (s == "classical") return Mode::classical;
    if (s == "spectral") return Mode::spectral;
    if (s == "decoherence") return Mode::decoherence;
    throw std::invalid_argument("unknown mode '" + s + "' (quantum|classical|spectral|decoherence)");
}

// A reproducible experiment. Runs always cover the beta = 0 and beta = pi variants of
// `spec`; spec.beta records the phase selected in a config file.
struct ExperimentPreset {
    std::string name;
    SuperpositionSpec spec;
    SimulationParams params{0.5, 5.0, 256, 60};
    bool auto_basis = true;  // pick n_basis with choose_basis_size at run time
    Mode mode = Mode::quantum;
    std::optional<DecoherenceConfig> decoherence;
    std::vector<int> markers{4, 20, 40, 45, 60};  // kicks reported in the summary
    std::vector<int> snapshots;                   // kicks with P(m) files
    std::vector<int> tail_thresholds{10, 20};     // |m| cut-offs for tail sums at the last kick
    int samples_per_line = 100000;                // classical
    int rmt_seeds = 20;                           // spectral
    int rmt_bandwidth = -1;                       // spectral; -1 means 2k

    SuperpositionSpec variant(double beta) const { return spec.with_beta(beta); }
};

inline ExperimentPreset case_a(std::string name, Mode mode) {
    ExperimentPreset p;
    p.name = std::move(name);
    p.spec = {2, -1, pi / 4, 0.0, BasisKind::momentum};
    p.params = SimulationParams(0.5, 5.0, 256, 60);
    p.mode = mode;
    return p;
}

inline ExperimentPreset case_b(std::string name, Mode mode) {
    ExperimentPreset p;
    p.name = std::move(name);
    p.spec = {1, 2, pi / 4, 0.0, BasisKind::momentum};
    p.params = SimulationParams(1.0, 5.0, 256, 60);
    p.mode = mode;
    return p;
}

inline std::vector<std::string> preset_names() {
    return {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "resonance", "rmt-compare"};
}

inline ExperimentPreset make_preset(const std::string& name) {
    if (name == "fig1a") return case_a(name, Mode::quantum);
    if (name == "fig1b") return case_b(name, Mode::quantum);
    if (name == "fig2a" || name == "fig2b") {
        auto p = name == "fig2a" ? case_a(name, Mode::quantum) : case_b(name, Mode::quantum);
        p.snapshots = {60};
        return p;
    }
    if (name == "fig3a") return case_a(name, Mode::classical);
    if (name == "fig3b") return case_b(name, Mode::classical);
    if (name == "fig4a" || name == "fig4b") {
        auto p = case_b(name, Mode::decoherence);
        p.decoherence = DecoherenceConfig{name == "fig4a" ? 0.05 : 0.15, 100, 0, 1};
        return p;
    }
    if (name == "resonance") {
        auto p = case_a(name, Mode::quantum);
        p.params = SimulationParams(pi / 3, 5.0, 256, 60);
        return p;
    }
    if (name == "rmt-compare") {
        auto p = case_a(name, Mode::spectral);
        p.auto_basis = false;
        return p;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace rotorlab::experiments
