// runner.hpp
// Evaluates presets into headline scalars and CSV tables, and writes them to disk.
//
// CSV contract:
//   series.csv        kick,E_beta0,E_betapi            (quantum, classical)
//   series.csv        kick,E_beta0,E_betapi,S_beta0,S_betapi   (decoherence)
//   snapshot_k<K>.csv m,P_beta0,P_betapi
//   eigenphases.csv   j,phi                            (spectral)
//   summary.txt       key=value, one per line
// Numbers are printed with 12 significant digits.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rotorlab/classical.hpp"
#include "rotorlab/decoherence.hpp"
#include "rotorlab/experiments/preset.hpp"
#include "rotorlab/propagator.hpp"
#include "rotorlab/spectral.hpp"

namespace rotorlab::experiments {

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Table {
    std::string filename;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const {
        std::string out;
        auto emit = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        emit(header);
        for (const auto& r : rows) emit(r);
        return out;
    }
};

struct BinaryFile {
    std::string filename;
    std::vector<char> bytes;
};

struct RunOutput {
    std::string preset;
    std::vector<std::pair<std::string, double>> headline;
    std::vector<Table> tables;
    std::vector<BinaryFile> binaries;

    void add(std::string key, double value) { headline.emplace_back(std::move(key), value); }

    std::optional<double> find(const std::string& key) const {
        for (const auto& [k, v] : headline)
            if (k == key) return v;
        return std::nullopt;
    }
    double value(const std::string& key) const {
        if (auto v = find(key)) return *v;
        throw std::out_of_range("no headline value '" + key + "' in run of " + preset);
    }

    std::string summary() const {
        std::string out;
        for (const auto& [k, v] : headline) out += k + "=" + format_number(v) + "\n";
        return out;
    }
};

struct RunOverrides {
    std::optional<int> kicks;
    std::optional<int> basis;
    std::optional<int> samples_per_line;
    std::optional<int> realizations;
};

// Least-squares slope of values[from..to] against the kick index.
inline double fitted_slope(const std::vector<double>& values, int from, int to) {
    if (from < 0 || to >= static_cast<int>(values.size()) || to - from < 1)
        throw std::invalid_argument("slope window out of range");
    const int n = to - from + 1;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = from; i <= to; ++i) {
        const double x = i, y = values[static_cast<std::size_t>(i)];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// |a - b| / min(a, b)
inline double relative_contrast(double a, double b) { return std::abs(a - b) / std::min(a, b); }

namespace detail {

inline int resolve_kicks(const ExperimentPreset& p, const RunOverrides& o) {
    const int kicks = o.kicks.value_or(p.params.kicks());
    if (kicks < 0) throw std::invalid_argument("kicks must be >= 0");
    return kicks;
}

inline int max_abs_index(const SuperpositionSpec& s) { return std::max(std::abs(s.m), std::abs(s.n)); }

inline SimulationParams resolve_quantum_params(const ExperimentPreset& p, const RunOverrides& o) {
    const int kicks = resolve_kicks(p, o);
    const SimulationParams base = p.params.with_kicks(kicks);
    if (o.basis) return base.with_basis(*o.basis);
    if (!p.auto_basis) return base;
    return base.with_basis(choose_basis_size(base, kicks, max_abs_index(p.spec)));
}

inline std::vector<int> markers_within(const ExperimentPreset& p, int kicks) {
    std::vector<int> out;
    for (int k : p.markers)
        if (k >= 0 && k <= kicks) out.push_back(k);
    if (std::find(out.begin(), out.end(), kicks) == out.end()) out.push_back(kicks);
    std::sort(out.begin(), out.end());
    return out;
}

inline void add_common(RunOutput& out, const SimulationParams& params) {
    out.add("tau", params.tau());
    out.add("k", params.k());
    out.add("kappa", params.kappa());
    out.add("kicks", params.kicks());
}

inline void add_slopes(RunOutput& out, const std::vector<double>& plus, const std::vector<double>& minus, int kicks) {
    if (kicks >= 21) {
        out.add("slope_plus", fitted_slope(plus, 20, kicks));
        out.add("slope_minus", fitted_slope(minus, 20, kicks));
    }
}

inline Table series_table(const ObservableSeries& plus, const ObservableSeries& minus, bool with_purity) {
    Table t{"series.csv", {"kick", "E_beta0", "E_betapi"}, {}};
    if (with_purity) {
        t.header.push_back("S_beta0");
        t.header.push_back("S_betapi");
    }
    for (std::size_t i = 0; i < plus.size(); ++i) {
        const auto& a = plus.entries()[i];
        const auto& b = minus.entries()[i];
        std::vector<std::string> row{std::to_string(a.kick), format_number(a.energy), format_number(b.energy)};
        if (with_purity) {
            row.push_back(a.purity ? format_number(*a.purity) : "");
            row.push_back(b.purity ? format_number(*b.purity) : "");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline RunOutput evaluate_quantum(const ExperimentPreset& p, const RunOverrides& o) {
    const SimulationParams params = resolve_quantum_params(p, o);
    const int kicks = params.kicks();
    const PropagatorPlan plan(params);
    std::vector<int> snaps;
    for (int s : p.snapshots)
        if (s >= 0 && s <= kicks) snaps.push_back(s);

    AngularState plus = prepare_superposition(p.variant(0.0), params.n_basis());
    AngularState minus = prepare_superposition(p.variant(pi), params.n_basis());
    const ObservableSeries sp = propagate(plus, plan, kicks, snaps);
    const ObservableSeries sm = propagate(minus, plan, kicks, snaps);

    RunOutput out;
    out.preset = p.name;
    add_common(out, params);
    out.add("n_basis", params.n_basis());

    std::optional<ObservableSeries> basis_m, basis_n;
    if (p.spec.basis_kind == BasisKind::momentum) {
        basis_m = propagate(AngularState::basis(params.n_basis(), p.spec.m), plan, kicks);
        basis_n = propagate(AngularState::basis(params.n_basis(), p.spec.n), plan, kicks);
    }
    for (int k : markers_within(p, kicks)) {
        const std::string tag = std::to_string(k);
        out.add("E_plus_" + tag, sp.energy(k));
        out.add("E_minus_" + tag, sm.energy(k));
        if (basis_m) {
            out.add("E_m_" + tag, basis_m->energy(k));
            out.add("E_n_" + tag, basis_n->energy(k));
        }
    }
    const auto pp = momentum_distribution(plus);
    const auto pm = momentum_distribution(minus);
    for (int t : p.tail_thresholds) {
        out.add("tail" + std::to_string(t) + "_plus", tail_probability(pp, t));
        out.add("tail" + std::to_string(t) + "_minus", tail_probability(pm, t));
    }
    out.add("contrast", relative_contrast(sp.energy(kicks), sm.energy(kicks)));
    add_slopes(out, sp.energies(), sm.energies(), kicks);
    const auto cc = control_criterion(params);
    out.add("control_k2_over_n", cc.k_squared_over_n);
    out.add("control_passes", cc.passes ? 1.0 : 0.0);

    out.tables.push_back(series_table(sp, sm, false));
    for (int s : snaps) {
        Table t{"snapshot_k" + std::to_string(s) + ".csv", {"m", "P_beta0", "P_betapi"}, {}};
        const auto& a = sp.snapshots().at(s);
        const auto& b = sm.snapshots().at(s);
        for (std::size_t i = 0; i < a.size(); ++i)
            t.rows.push_back({std::to_string(static_cast<int>(i) - params.n_basis() / 2), format_number(a[i]),
                              format_number(b[i])});
        out.tables.push_back(std::move(t));
    }
    return out;
}

inline RunOutput evaluate_classical(const ExperimentPreset& p, const RunOverrides& o) {
    const int kicks = resolve_kicks(p, o);
    const SimulationParams params = p.params.with_kicks(kicks);
    const int samples = o.samples_per_line.value_or(p.samples_per_line);
    ClassicalEnsemble plus = wigner_ensemble(p.variant(0.0), params.tau(), samples);
    ClassicalEnsemble minus = wigner_ensemble(p.variant(pi), params.tau(), samples);
    const ObservableSeries sp = propagate_ensemble(plus, params.kappa(), kicks);
    const ObservableSeries sm = propagate_ensemble(minus, params.kappa(), kicks);

    RunOutput out;
    out.preset = p.name;
    add_common(out, params);
    out.add("samples_per_line", samples);
    for (int k : markers_within(p, kicks)) {
        out.add("E_plus_" + std::to_string(k), sp.energy(k));
        out.add("E_minus_" + std::to_string(k), sm.energy(k));
    }
    out.add("weight_plus", plus.total_weight());
    out.add("weight_minus", minus.total_weight());
    out.add("contrast", relative_contrast(sp.energy(kicks), sm.energy(kicks)));
    add_slopes(out, sp.energies(), sm.energies(), kicks);
    out.tables.push_back(series_table(sp, sm, false));
    return out;
}

inline RunOutput evaluate_decoherence(const ExperimentPreset& p, std::uint64_t seed, const RunOverrides& o) {
    const SimulationParams params = resolve_quantum_params(p, o);
    const int kicks = params.kicks();
    DecoherenceConfig config = p.decoherence.value_or(DecoherenceConfig{});
    config.seed = seed;
    if (o.realizations) config.n_realizations = *o.realizations;
    const PropagatorPlan plan(params);
    const ObservableSeries sp = propagate_with_decoherence(p.variant(0.0), plan, config);
    const ObservableSeries sm = propagate_with_decoherence(p.variant(pi), plan, config);

    RunOutput out;
    out.preset = p.name;
    add_common(out, params);
    out.add("n_basis", params.n_basis());
    out.add("r", config.r);
    out.add("realizations", config.n_realizations);
    for (int k : markers_within(p, kicks)) {
        const std::string tag = std::to_string(k);
        out.add("E_plus_" + tag, sp.energy(k));
        out.add("E_minus_" + tag, sm.energy(k));
        if (auto s = sp.purity(k)) out.add("S_plus_" + tag, *s);
        if (auto s = sm.purity(k)) out.add("S_minus_" + tag, *s);
    }
    out.add("contrast", relative_contrast(sp.energy(kicks), sm.energy(kicks)));
    add_slopes(out, sp.energies(), sm.energies(), kicks);
    out.tables.push_back(series_table(sp, sm, true));
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of nothing");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline Table eigenphase_table(const FloquetSpectrum& s) {
    Table t{"eigenphases.csv", {"j", "phi"}, {}};
    for (std::size_t j = 0; j < s.eigenphases.size(); ++j)
        t.rows.push_back({std::to_string(j), format_number(s.eigenphases[j])});
    return t;
}

inline RunOutput evaluate_spectral(const ExperimentPreset& p, std::uint64_t seed, const RunOverrides& o) {
    const int d = o.basis.value_or(p.params.n_basis());
    const SimulationParams params = p.params.with_basis(d);
    const FloquetMatrix f = build_floquet_matrix(params, d);
    const FloquetSpectrum s = diagonalize(f);

    const int band = p.rmt_bandwidth >= 0 ? p.rmt_bandwidth : static_cast<int>(std::lround(2 * params.k()));
    std::vector<double> random_ratios;
    Table rmt{"rmt.csv", {"seed", "ratio"}, {}};
    for (int i = 0; i < p.rmt_seeds; ++i) {
        const std::uint64_t sd = seed + static_cast<std::uint64_t>(i);
        const double ratio = interference_ratio(diagonalize(banded_random_model(d, band, sd)), p.spec.m, p.spec.n);
        random_ratios.push_back(ratio);
        rmt.rows.push_back({std::to_string(sd), format_number(ratio)});
    }
    const double rotor_ratio = interference_ratio(s, p.spec.m, p.spec.n);
    const double random_median = median(random_ratios);
    const auto cc = control_criterion(params);

    RunOutput out;
    out.preset = p.name;
    out.add("tau", params.tau());
    out.add("k", params.k());
    out.add("kappa", params.kappa());
    out.add("n_basis", d);
    out.add("bandwidth_rotor", bandwidth_estimate(f, 1e-4));
    out.add("bandwidth_random", band);
    out.add("ratio_rotor", rotor_ratio);
    out.add("ratio_random_median", random_median);
    out.add("ratio_excess", rotor_ratio / random_median);
    out.add("interference_avg_plus", time_averaged_interference(s, p.variant(0.0)));
    out.add("interference_avg_minus", time_averaged_interference(s, p.variant(pi)));
    out.add("control_k2_over_n", cc.k_squared_over_n);
    out.add("control_passes", cc.passes ? 1.0 : 0.0);
    out.tables.push_back(eigenphase_table(s));
    out.tables.push_back(std::move(rmt));
    return out;
}

}  // namespace detail

inline RunOutput evaluate_preset(const ExperimentPreset& p, std::uint64_t seed = 0, const RunOverrides& o = {}) {
    switch (p.mode) {
        case Mode::quantum: return detail::evaluate_quantum(p, o);
        case Mode::classical: return detail::evaluate_classical(p, o);
        case Mode::decoherence: return detail::evaluate_decoherence(p, seed, o);
        case Mode::spectral: return detail::evaluate_spectral(p, seed, o);
    }
    throw std::logic_error("unhandled mode");
}

// Row-major complex pairs, little-endian IEEE-754 doubles: U_{jl} at offset 16*(j*D + l).
inline std::vector<char> eigenvector_dump(const FloquetSpectrum& s) {
    const int d = s.dim();
    std::vector<char> bytes;
    bytes.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d) * 16);
    auto put = [&bytes](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    };
    for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
            put(s.vectors(j, l).real());
            put(s.vectors(j, l).imag());
        }
    return bytes;
}

inline RunOutput evaluate_spectrum(double tau, double k, int dim) {
    const SimulationParams params(tau, k, dim, 0);
    const FloquetMatrix f = build_floquet_matrix(params, dim);
    const FloquetSpectrum s = diagonalize(f);
    RunOutput out;
    out.preset = "spectrum";
    out.add("tau", tau);
    out.add("k", k);
    out.add("n_basis", dim);
    out.add("unitarity_defect", unitarity_defect(f.entries));
    out.add("reconstruction_residual", (reconstruct(s) - f.entries).cwiseAbs().maxCoeff());
    out.add("bandwidth", bandwidth_estimate(f, 1e-4));
    out.tables.push_back(detail::eigenphase_table(s));
    out.binaries.push_back({"eigenvectors.bin", eigenvector_dump(s)});
    return out;
}

namespace detail {

inline void write_atomic(const std::filesystem::path& path, const char* data, std::size_t size) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open " + tmp.string() + " for writing");
        f.write(data, static_cast<std::streamsize>(size));
        if (!f) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline std::vector<std::filesystem::path> write_outputs(const RunOutput& out, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& t : out.tables) {
        const std::string csv = t.to_csv();
        detail::write_atomic(dir / t.filename, csv.data(), csv.size());
        written.push_back(dir / t.filename);
    }
    for (const auto& b : out.binaries) {
        detail::write_atomic(dir / b.filename, b.bytes.data(), b.bytes.size());
        written.push_back(dir / b.filename);
    }
    const std::string summary = out.summary();
    detail::write_atomic(dir / "summary.txt", summary.data(), summary.size());
    written.push_back(dir / "summary.txt");
    return written;
}

}  // namespace rotorlab::experiments
