// propagator.hpp
// Split-operator evolution under the one-period kicked-rotor map
//   F = exp[i(tau/4) d^2/dtheta^2] exp[-ik cos(theta)] exp[i(tau/4) d^2/dtheta^2].
// The free factor multiplies mode m by e^{-i m^2 tau/4}; the kick is diagonal on the
// angle grid theta_j = 2 pi j / D, reached through an FFT.

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <vector>

#include "rotorlab/core_state.hpp"

namespace rotorlab {

// Fraction of the momentum grid (each edge combined) watched by the truncation guard.
inline constexpr double guard_band_fraction = 0.10;
inline constexpr double guard_threshold = 1e-12;

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Owns a forward/backward FFTW plan pair of length n. Execution goes through the
// new-array interface, so one plan serves any number of buffers concurrently.
class FftPair {
public:
    explicit FftPair(int n) : n_(n) {
        std::vector<cplx> scratch(static_cast<std::size_t>(n));
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard lock(fftw_planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, flags);
        if (!forward_ || !backward_) throw Error("FFTW failed to create a plan");
    }
    ~FftPair() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;

    int size() const noexcept { return n_; }

    // out_j = sum_q in_q e^{-2 pi i jq/n}
    void forward(std::span<cplx> data) const { exec(forward_, data); }
    // out_j = sum_q in_q e^{+2 pi i jq/n}, unnormalized
    void backward(std::span<cplx> data) const { exec(backward_, data); }

private:
    void exec(fftw_plan plan, std::span<cplx> data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, p, p);
    }

    int n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace detail

// Precomputed phase tables and transforms for one parameter set. Immutable.
class PropagatorPlan {
public:
    explicit PropagatorPlan(const SimulationParams& params)
        : params_(params), fft_(std::make_shared<const detail::FftPair>(params.n_basis())) {
        const int d = params.n_basis();
        free_half_.resize(static_cast<std::size_t>(d));
        kick_.resize(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            const double m = i - d / 2;
            free_half_[static_cast<std::size_t>(i)] = std::polar(1.0, -m * m * params.tau() / 4.0);
            const double theta = two_pi * i / d;
            kick_[static_cast<std::size_t>(i)] = std::polar(1.0, -params.k() * std::cos(theta));
        }
    }

    const SimulationParams& params() const noexcept { return params_; }
    int dim() const noexcept { return params_.n_basis(); }

    std::span<const cplx> free_half_phases() const noexcept { return free_half_; }
    std::span<const cplx> kick_phases() const noexcept { return kick_; }

    double angle(int j) const noexcept { return two_pi * j / dim(); }

    // Momentum amplitudes (state layout) -> wavefunction samples on the angle grid,
    // up to the alternating factor (-1)^j that the kick commutes with.
    void to_angle(std::span<cplx> data) const { fft_->backward(data); }
    // Inverse of to_angle; the 1/D normalization lives here.
    void to_momentum(std::span<cplx> data) const {
        fft_->forward(data);
        const double scale = 1.0 / dim();
        for (auto& c : data) c *= scale;
    }

private:
    SimulationParams params_;
    std::shared_ptr<const detail::FftPair> fft_;
    std::vector<cplx> free_half_;
    std::vector<cplx> kick_;
};

// Largest population inside the guard band (the outer 5% of indices at each edge).
inline double edge_population(const AngularState& state) {
    const int d = state.dim();
    const int band = std::max(1, static_cast<int>(std::ceil(guard_band_fraction * d / 2.0)));
    const auto a = state.amplitudes();
    double worst = 0.0;
    for (int i = 0; i < band; ++i) {
        worst = std::max(worst, std::norm(a[static_cast<std::size_t>(i)]));
        worst = std::max(worst, std::norm(a[static_cast<std::size_t>(d - 1 - i)]));
    }
    return worst;
}

inline void check_truncation(const AngularState& state) {
    const double edge = edge_population(state);
    if (edge >= guard_threshold) {
        std::ostringstream msg;
        msg << "basis too small: population " << edge << " in the outer "
            << guard_band_fraction * 100 << "% of a " << state.dim() << "-state momentum basis";
        throw BasisTooSmall(msg.str(), edge);
    }
}

namespace detail {

inline void apply_phases(std::span<cplx> data, std::span<const cplx> phases, bool conjugate) {
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] *= conjugate ? std::conj(phases[i]) : phases[i];
}

inline void check_dims(const AngularState& state, const PropagatorPlan& plan) {
    if (state.dim() != plan.dim())
        throw std::invalid_argument("state dimension " + std::to_string(state.dim()) +
                                    " does not match plan dimension " + std::to_string(plan.dim()));
}

}  // namespace detail

// One period of F without the truncation guard. Used where edge columns are expected
// (Floquet matrix construction).
inline void floquet_step_unchecked(std::span<cplx> amps, const PropagatorPlan& plan) {
    detail::apply_phases(amps, plan.free_half_phases(), false);
    plan.to_angle(amps);
    detail::apply_phases(amps, plan.kick_phases(), false);
    plan.to_momentum(amps);
    detail::apply_phases(amps, plan.free_half_phases(), false);
}

inline AngularState floquet_step(AngularState state, const PropagatorPlan& plan) {
    detail::check_dims(state, plan);
    check_truncation(state);
    floquet_step_unchecked(state.amplitudes(), plan);
    return state;
}

// F^dagger: conjugated factors in reverse order.
inline AngularState floquet_step_inverse(AngularState state, const PropagatorPlan& plan) {
    detail::check_dims(state, plan);
    auto amps = state.amplitudes();
    detail::apply_phases(amps, plan.free_half_phases(), true);
    plan.to_angle(amps);
    detail::apply_phases(amps, plan.kick_phases(), true);
    plan.to_momentum(amps);
    detail::apply_phases(amps, plan.free_half_phases(), true);
    return state;
}

// Bare kick e^{-ik cos theta}, without free evolution.
inline AngularState apply_kick(AngularState state, const PropagatorPlan& plan) {
    detail::check_dims(state, plan);
    auto amps = state.amplitudes();
    plan.to_angle(amps);
    detail::apply_phases(amps, plan.kick_phases(), false);
    plan.to_momentum(amps);
    return state;
}

// Evolves `state` in place for n_kicks and records the scaled energy after every kick
// (kick 0 is the initial state) plus P(m) at the requested kicks.
inline ObservableSeries propagate(AngularState& state, const PropagatorPlan& plan, int n_kicks,
                                  std::span<const int> record_snapshots_at = {}) {
    if (n_kicks < 0) throw std::invalid_argument("n_kicks must be >= 0");
    detail::check_dims(state, plan);
    const double tau = plan.params().tau();
    ObservableSeries series;
    auto wants_snapshot = [&](int kick) {
        return std::find(record_snapshots_at.begin(), record_snapshots_at.end(), kick) !=
               record_snapshots_at.end();
    };
    for (int kick = 0;; ++kick) {
        series.push(kick, scaled_energy(state, tau));
        if (wants_snapshot(kick)) series.add_snapshot(kick, momentum_distribution(state));
        if (kick == n_kicks) break;
        state = floquet_step(std::move(state), plan);
    }
    return series;
}

inline ObservableSeries propagate(AngularState&& state, const PropagatorPlan& plan, int n_kicks,
                                  std::span<const int> record_snapshots_at = {}) {
    AngularState s = std::move(state);
    return propagate(s, plan, n_kicks, record_snapshots_at);
}

inline constexpr int min_basis_size = 256;
inline constexpr int max_basis_size = 1 << 16;

// Smallest power-of-two basis (>= 256) for which the basis states |+-max_abs_m> survive
// n_kicks with the guard band below threshold. Localization means the widest basis
// state bounds every superposition built from states no wider than it.
inline int choose_basis_size(const SimulationParams& params, int n_kicks, int max_abs_m = 2) {
    const double spread = 4.0 * params.k() * std::sqrt(static_cast<double>(std::max(n_kicks, 0)));
    const auto want = static_cast<unsigned>(std::ceil(spread)) + 2u * static_cast<unsigned>(max_abs_m);
    int d = std::max(min_basis_size, static_cast<int>(std::bit_ceil(std::max(want, 2u))));
    for (; d <= max_basis_size; d *= 2) {
        if (2 * max_abs_m >= d / 2) continue;
        const PropagatorPlan plan(params.with_basis(d));
        bool ok = true;
        for (int m : {max_abs_m, -max_abs_m}) {
            AngularState s = AngularState::basis(d, m);
            try {
                propagate(s, plan, n_kicks);
                check_truncation(s);
            } catch (const BasisTooSmall&) {
                ok = false;
                break;
            }
        }
        if (ok) return d;
    }
    throw BasisTooSmall("no basis up to " + std::to_string(max_basis_size) +
                            " states contains the evolution",
                        1.0);
}

}  // namespace rotorlab
