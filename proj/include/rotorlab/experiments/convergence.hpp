#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rotorlab/experiments/runner.hpp"

namespace rotorlab::experiments {

// Headline scalars of a preset re-evaluated with the resolution knob doubled
// `doublings` times: basis size (quantum, spectral), samples per line (classical) or
// realization count (decoherence).
struct ConvergenceReport {
    std::string parameter;
    std::vector<int> levels;
    struct Row {
        std::string key;
        std::vector<double> values;
        std::vector<double> rel_delta;  // |v[i+1] - v[i]| / |v[i]|
    };
    std::vector<Row> rows;

    const Row& row(const std::string& key) const {
        for (const auto& r : rows)
            if (r.key == key) return r;
        throw std::out_of_range("no convergence row '" + key + "'");
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "key";
        for (int l : levels) os << "," << parameter << "=" << l;
        for (std::size_t i = 1; i < levels.size(); ++i) os << ",rel_delta_" << i;
        os << "\n";
        for (const auto& r : rows) {
            os << r.key;
            for (double v : r.values) os << "," << format_number(v);
            for (double d : r.rel_delta) os << "," << format_number(d);
            os << "\n";
        }
        return os.str();
    }
};

inline ConvergenceReport convergence_report(const ExperimentPreset& preset, int doublings, std::uint64_t seed = 0,
                                            std::optional<int> kicks = std::nullopt) {
    if (doublings < 1) throw std::invalid_argument("doublings must be >= 1");
    ConvergenceReport rep;
    int base = 0;
    switch (preset.mode) {
        case Mode::quantum:
        case Mode::spectral:
            rep.parameter = "n_basis";
            base = preset.mode == Mode::quantum
                       ? detail::resolve_quantum_params(preset, RunOverrides{kicks, {}, {}, {}}).n_basis()
                       : preset.params.n_basis();
            break;
        case Mode::classical:
            rep.parameter = "samples_per_line";
            base = preset.samples_per_line;
            break;
        case Mode::decoherence:
            rep.parameter = "realizations";
            base = preset.decoherence.value_or(DecoherenceConfig{}).n_realizations;
            break;
    }
    static const std::set<std::string> knobs{"tau", "k", "kappa", "kicks", "n_basis", "samples_per_line",
                                             "realizations", "r", "bandwidth_random"};
    std::vector<RunOutput> runs;
    for (int i = 0; i <= doublings; ++i) {
        const int level = base << i;
        rep.levels.push_back(level);
        RunOverrides o;
        o.kicks = kicks;
        if (rep.parameter == "n_basis") o.basis = level;
        else if (rep.parameter == "samples_per_line") o.samples_per_line = level;
        else o.realizations = level;
        runs.push_back(evaluate_preset(preset, seed, o));
    }
    for (const auto& [key, v0] : runs.front().headline) {
        if (knobs.contains(key)) continue;
        ConvergenceReport::Row row{key, {}, {}};
        bool complete = true;
        for (const auto& r : runs) {
            auto v = r.find(key);
            if (!v) {
                complete = false;
                break;
            }
            row.values.push_back(*v);
        }
        if (!complete) continue;
        for (std::size_t i = 1; i < row.values.size(); ++i) {
            const double prev = row.values[i - 1];
            const double diff = std::abs(row.values[i] - prev);
            row.rel_delta.push_back(prev != 0.0 ? diff / std::abs(prev) : diff);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace rotorlab::experiments
