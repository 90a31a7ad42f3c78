// core_state.hpp
// Angular-momentum basis states of the kicked rotor, initial superpositions
// and the diagonal observables (scaled energy, P(m), tail weights).

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotorlab/error.hpp"

namespace rotorlab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Exact floating remainder into [0, 2pi).
inline double wrap_angle(double theta) {
    double r = std::fmod(theta, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

// Dimensionless rotor parameters. kappa is always tau*k.
class SimulationParams {
public:
    SimulationParams(double tau, double k, int n_basis, int kicks)
        : tau_(tau), k_(k), n_basis_(n_basis), kicks_(kicks) {
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw std::invalid_argument("tau must be positive, got " + std::to_string(tau));
        if (!(k >= 0.0) || !std::isfinite(k))
            throw std::invalid_argument("k must be non-negative, got " + std::to_string(k));
        if (n_basis < 2 || n_basis % 2 != 0)
            throw std::invalid_argument("n_basis must be an even integer >= 2, got " +
                                        std::to_string(n_basis));
        if (kicks < 0) throw std::invalid_argument("kicks must be >= 0");
    }

    double tau() const noexcept { return tau_; }
    double k() const noexcept { return k_; }
    double kappa() const noexcept { return tau_ * k_; }
    int n_basis() const noexcept { return n_basis_; }
    int kicks() const noexcept { return kicks_; }

    SimulationParams with_basis(int d) const { return {tau_, k_, d, kicks_}; }
    SimulationParams with_kicks(int n) const { return {tau_, k_, n_basis_, n}; }

    friend bool operator==(const SimulationParams&, const SimulationParams&) = default;

private:
    double tau_;
    double k_;
    int n_basis_;
    int kicks_;
};

// Complex amplitudes c_m over m in [-D/2, D/2), stored at index m + D/2.
class AngularState {
public:
    explicit AngularState(int dim) : amps_(check_dim(dim)) {}
    explicit AngularState(std::vector<cplx> amps) : amps_(std::move(amps)) {
        check_dim(static_cast<int>(amps_.size()));
    }

    int dim() const noexcept { return static_cast<int>(amps_.size()); }
    int offset() const noexcept { return dim() / 2; }
    int m_min() const noexcept { return -offset(); }
    int m_max() const noexcept { return dim() - offset() - 1; }

    bool contains(int m) const noexcept { return m >= m_min() && m <= m_max(); }
    int index_of(int m) const {
        if (!contains(m))
            throw std::out_of_range("momentum " + std::to_string(m) + " outside [" +
                                    std::to_string(m_min()) + ", " + std::to_string(m_max()) + "]");
        return m + offset();
    }
    int m_of(int index) const noexcept { return index - offset(); }

    cplx amplitude(int m) const { return amps_[static_cast<std::size_t>(index_of(m))]; }
    cplx& amplitude(int m) { return amps_[static_cast<std::size_t>(index_of(m))]; }

    cplx operator[](std::size_t i) const { return amps_[i]; }
    cplx& operator[](std::size_t i) { return amps_[i]; }

    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    std::span<cplx> amplitudes() noexcept { return amps_; }

    double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto& c : amps_) s += std::norm(c);
        return s;
    }

    static AngularState basis(int dim, int m) {
        AngularState s(dim);
        s.amplitude(m) = 1.0;
        return s;
    }

private:
    static std::size_t check_dim(int dim) {
        if (dim < 2 || dim % 2 != 0)
            throw std::invalid_argument("state dimension must be even and >= 2, got " +
                                        std::to_string(dim));
        return static_cast<std::size_t>(dim);
    }

    std::vector<cplx> amps_;
};

enum class BasisKind { momentum, sine_parity, cosine_parity };

inline std::string to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::momentum: return "momentum";
        case BasisKind::sine_parity: return "sine";
        case BasisKind::cosine_parity: return "cosine";
    }
    return "?";
}

// cos(alpha)|m> + sin(alpha) e^{i beta}|n>, with |m> replaced by sin(m theta)/sqrt(pi)
// or cos(m theta)/sqrt(pi) for the parity kinds.
struct SuperpositionSpec {
    int m = 0;
    int n = 1;
    double alpha = pi / 4;
    double beta = 0.0;
    BasisKind basis_kind = BasisKind::momentum;

    void validate() const {
        if (m == n) throw std::invalid_argument("superposition needs m != n");
        if (basis_kind != BasisKind::momentum && (m < 1 || n < 1))
            throw std::invalid_argument("parity-basis states need m, n >= 1");
        if (!(alpha >= 0.0 && alpha <= pi / 2))
            throw std::invalid_argument("alpha must lie in [0, pi/2]");
        if (!(beta >= 0.0 && beta < two_pi))
            throw std::invalid_argument("beta must lie in [0, 2pi)");
    }

    SuperpositionSpec with_beta(double b) const {
        SuperpositionSpec s = *this;
        s.beta = b;
        return s;
    }
};

// Per-kick record of the scaled energy, optional purity and P(m) snapshots.
class ObservableSeries {
public:
    struct Entry {
        int kick;
        double energy;
        std::optional<double> purity;
    };

    void push(int kick, double energy, std::optional<double> purity = std::nullopt) {
        const int expected = entries_.empty() ? 0 : entries_.back().kick + 1;
        if (kick != expected)
            throw std::logic_error("series kick index must increase by one from 0");
        if (purity && !(*purity > 0.0 && *purity <= 1.0 + 1e-12))
            throw std::logic_error("purity outside (0, 1]");
        entries_.push_back({kick, energy, purity});
    }

    void add_snapshot(int kick, std::vector<double> pdist) { snapshots_[kick] = std::move(pdist); }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const std::map<int, std::vector<double>>& snapshots() const noexcept { return snapshots_; }

    std::size_t size() const noexcept { return entries_.size(); }
    double energy(int kick) const { return entries_.at(static_cast<std::size_t>(kick)).energy; }
    std::optional<double> purity(int kick) const {
        return entries_.at(static_cast<std::size_t>(kick)).purity;
    }
    int last_kick() const { return entries_.empty() ? -1 : entries_.back().kick; }

    std::vector<double> energies() const {
        std::vector<double> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.energy);
        return out;
    }

private:
    std::vector<Entry> entries_;
    std::map<int, std::vector<double>> snapshots_;
};

namespace detail {

// Adds `weight` times the real parity state of order j to `state`.
inline void add_parity_component(AngularState& state, BasisKind kind, int j, cplx weight) {
    const double r = 1.0 / std::sqrt(2.0);
    if (kind == BasisKind::sine_parity) {
        // sin(j theta)/sqrt(pi) = -i/sqrt2 (|j> - |-j>)
        state.amplitude(j) += weight * cplx(0.0, -r);
        state.amplitude(-j) += weight * cplx(0.0, r);
    } else {
        state.amplitude(j) += weight * r;
        state.amplitude(-j) += weight * r;
    }
}

}  // namespace detail

inline AngularState prepare_superposition(const SuperpositionSpec& spec, int dim) {
    spec.validate();
    AngularState state(dim);
    for (int j : {spec.m, spec.n}) {
        const bool fits = spec.basis_kind == BasisKind::momentum
                              ? state.contains(j)
                              : state.contains(j) && state.contains(-j);
        if (!fits)
            throw std::out_of_range("state index " + std::to_string(j) +
                                    " outside truncation of dimension " + std::to_string(dim));
    }
    const cplx cm = std::cos(spec.alpha);
    const cplx cn = std::sin(spec.alpha) * std::polar(1.0, spec.beta);
    if (spec.basis_kind == BasisKind::momentum) {
        state.amplitude(spec.m) = cm;
        state.amplitude(spec.n) = cn;
    } else {
        detail::add_parity_component(state, spec.basis_kind, spec.m, cm);
        detail::add_parity_component(state, spec.basis_kind, spec.n, cn);
    }
    return state;
}

// (tau^2/2) sum_m m^2 |c_m|^2
inline double scaled_energy(const AngularState& state, double tau) {
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double m = state.m_of(static_cast<int>(i));
        acc += m * m * std::norm(amps[i]);
    }
    return 0.5 * tau * tau * acc;
}

// P(m) laid out like the state: index m + D/2.
inline std::vector<double> momentum_distribution(const AngularState& state) {
    std::vector<double> p;
    p.reserve(static_cast<std::size_t>(state.dim()));
    for (const auto& c : state.amplitudes()) p.push_back(std::norm(c));
    return p;
}

// sum of P(m) over |m| >= m_min; pdist uses the state layout (offset size/2).
inline double tail_probability(std::span<const double> pdist, int m_min) {
    const int offset = static_cast<int>(pdist.size()) / 2;
    double acc = 0.0;
    for (std::size_t i = 0; i < pdist.size(); ++i) {
        const int m = static_cast<int>(i) - offset;
        if (std::abs(m) >= m_min) acc += pdist[i];
    }
    return acc;
}

inline cplx overlap(const AngularState& a, const AngularState& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("overlap of states with dimensions " + std::to_string(a.dim()) +
                                    " and " + std::to_string(b.dim()));
    cplx acc = 0.0;
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

}  // namespace rotorlab
