// classical.hpp
// Standard-map propagation of signed-weight trajectory ensembles. An ensemble built
// by wigner_ensemble samples the Wigner function of cos(a)|m> + sin(a)e^{ib}|n>:
// two positive lines at L/tau = m, n and a signed interference line at (m+n)/2.

#pragma once

#include <cmath>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include "rotorlab/core_state.hpp"

namespace rotorlab {

struct ClassicalTrajectory {
    double theta = 0.0;
    double L = 0.0;  // scaled momentum L*tau/hbar
    double weight = 1.0;
};

// L_N = L + kappa sin(theta + L/2), then theta_N = theta + (L_N + L)/2.
inline ClassicalTrajectory standard_map_step(ClassicalTrajectory t, double kappa) {
    const double L_next = t.L + kappa * std::sin(t.theta + 0.5 * t.L);
    t.theta = wrap_angle(t.theta + 0.5 * (L_next + t.L));
    t.L = L_next;
    return t;
}

// Jacobian determinant of one map step at (theta, L), by central differences on the
// unwrapped map.
inline double map_jacobian_determinant(double theta, double L, double kappa, double h = 1e-6) {
    auto step = [kappa](double th, double l, double& th_out, double& l_out) {
        l_out = l + kappa * std::sin(th + 0.5 * l);
        th_out = th + 0.5 * (l_out + l);
    };
    double tp, lp, tm, lm;
    step(theta + h, L, tp, lp);
    step(theta - h, L, tm, lm);
    const double dth_dth = (tp - tm) / (2 * h);
    const double dl_dth = (lp - lm) / (2 * h);
    step(theta, L + h, tp, lp);
    step(theta, L - h, tm, lm);
    const double dth_dl = (tp - tm) / (2 * h);
    const double dl_dl = (lp - lm) / (2 * h);
    return dth_dth * dl_dl - dth_dl * dl_dth;
}

class ClassicalEnsemble {
public:
    struct Provenance {
        SuperpositionSpec spec;
        double tau = 1.0;
        int samples_per_line = 0;
    };

    ClassicalEnsemble() = default;
    ClassicalEnsemble(std::vector<ClassicalTrajectory> trajectories, Provenance provenance)
        : trajectories_(std::move(trajectories)), provenance_(provenance) {}

    const std::vector<ClassicalTrajectory>& trajectories() const noexcept { return trajectories_; }
    std::vector<ClassicalTrajectory>& trajectories() noexcept { return trajectories_; }
    const Provenance& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return trajectories_.size(); }

    // Stratum 0: line m, 1: line n, 2: interference line (m+n)/2.
    std::span<const ClassicalTrajectory> stratum(int which) const {
        const auto s = static_cast<std::size_t>(provenance_.samples_per_line);
        if (which < 0 || which > 2 || trajectories_.size() != 3 * s)
            throw std::out_of_range("ensemble has no stratum " + std::to_string(which));
        return std::span(trajectories_).subspan(static_cast<std::size_t>(which) * s, s);
    }

    double total_weight() const {
        double acc = 0.0;
        for (const auto& t : trajectories_) acc += t.weight;
        return acc;
    }

private:
    std::vector<ClassicalTrajectory> trajectories_;
    Provenance provenance_;
};

inline ClassicalEnsemble wigner_ensemble(const SuperpositionSpec& spec, double tau,
                                         int samples_per_line) {
    spec.validate();
    if (spec.basis_kind != BasisKind::momentum)
        throw std::invalid_argument("classical Wigner ensemble is defined for momentum eigenstates only");
    if (samples_per_line < 1) throw std::invalid_argument("samples_per_line must be >= 1");
    const int dm = std::abs(spec.m - spec.n);
    if (samples_per_line < 100 * dm)
        throw std::invalid_argument("samples_per_line must be >= 100*|m-n| = " +
                                    std::to_string(100 * dm) + " to resolve cos((m-n) theta)");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");

    const int S = samples_per_line;
    const double w_m = std::cos(spec.alpha) * std::cos(spec.alpha) / S;
    const double w_n = std::sin(spec.alpha) * std::sin(spec.alpha) / S;
    const double w_x = std::sin(2 * spec.alpha) / S;
    const double L_m = spec.m * tau;
    const double L_n = spec.n * tau;
    const double L_x = 0.5 * (spec.m + spec.n) * tau;

    std::vector<ClassicalTrajectory> traj;
    traj.reserve(3 * static_cast<std::size_t>(S));
    for (int j = 0; j < S; ++j) traj.push_back({two_pi * j / S, L_m, w_m});
    for (int j = 0; j < S; ++j) traj.push_back({two_pi * j / S, L_n, w_n});
    for (int j = 0; j < S; ++j) {
        const double theta = two_pi * j / S;
        traj.push_back({theta, L_x, w_x * std::cos(spec.beta - (spec.m - spec.n) * theta)});
    }
    return {std::move(traj), {spec, tau, S}};
}

// sum_i w_i L_i^2 / 2 with compensated summation; the weights are signed.
inline double ensemble_energy(const ClassicalEnsemble& ens) {
    double sum = 0.0, comp = 0.0;
    for (const auto& t : ens.trajectories()) {
        const double x = 0.5 * t.weight * t.L * t.L;
        const double s = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
        sum = s;
    }
    return sum + comp;
}

inline void advance_ensemble(ClassicalEnsemble& ens, double kappa) {
    for (auto& t : ens.trajectories()) t = standard_map_step(t, kappa);
}

// Evolves ens in place; entry N holds the energy after N kicks.
inline ObservableSeries propagate_ensemble(ClassicalEnsemble& ens, double kappa, int n_kicks) {
    if (n_kicks < 0) throw std::invalid_argument("n_kicks must be >= 0");
    ObservableSeries series;
    for (int kick = 0;; ++kick) {
        series.push(kick, ensemble_energy(ens));
        if (kick == n_kicks) break;
        advance_ensemble(ens, kappa);
    }
    return series;
}

inline ObservableSeries propagate_ensemble(ClassicalEnsemble&& ens, double kappa, int n_kicks) {
    ClassicalEnsemble e = std::move(ens);
    return propagate_ensemble(e, kappa, n_kicks);
}

}  // namespace rotorlab
