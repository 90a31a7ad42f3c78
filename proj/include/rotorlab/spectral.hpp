// spectral.hpp
// Truncated Floquet matrix <i|F|j>, its unitary diagonalization
//   <i|F|j> = sum_k e^{-i phi_k} U*_{ki} U_{kj},
// the spectral energy expansion with its interference term, eigenvector-correlation
// statistics, band-structure measurement and a banded random-matrix surrogate.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rotorlab/core_state.hpp"
#include "rotorlab/propagator.hpp"

namespace rotorlab {

inline constexpr int max_dense_dimension = 512;

struct FloquetMatrix {
    Eigen::MatrixXcd entries;                 // (i, j) = <m_i|F|m_j>, m_i = i - D/2
    std::optional<SimulationParams> params;   // empty for random surrogates
    std::vector<int> guard_exempt_columns;    // inputs that sit inside the guard band

    int dim() const noexcept { return static_cast<int>(entries.rows()); }
};

struct FloquetSpectrum {
    std::vector<double> eigenphases;  // ascending, in [0, 2pi); eigenvalue e^{-i phi}
    Eigen::MatrixXcd vectors;         // row j: U_{jl}, with <l|u_j> = conj(U_{jl})
    std::optional<SimulationParams> params;

    int dim() const noexcept { return static_cast<int>(vectors.rows()); }
    int offset() const noexcept { return dim() / 2; }
    int index_of(int m) const {
        const int i = m + offset();
        if (i < 0 || i >= dim())
            throw std::out_of_range("momentum " + std::to_string(m) + " outside spectrum basis");
        return i;
    }
    // Energy scale tau^2/2 mapping <l^2> to the scaled energy; 1/2 without params.
    double energy_scale() const noexcept {
        const double tau = params ? params->tau() : 1.0;
        return 0.5 * tau * tau;
    }
};

inline double unitarity_defect(const Eigen::MatrixXcd& f) {
    const auto n = f.rows();
    return (f.adjoint() * f - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

// Column j is one split-operator period applied to |m_j>.
inline FloquetMatrix build_floquet_matrix(const SimulationParams& params, int dim) {
    if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("Floquet matrix dimension must be even");
    const SimulationParams p = params.with_basis(dim);
    const PropagatorPlan plan(p);
    FloquetMatrix f{Eigen::MatrixXcd::Zero(dim, dim), p, {}};
    std::vector<cplx> column(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        std::fill(column.begin(), column.end(), cplx{});
        column[static_cast<std::size_t>(j)] = 1.0;
        if (edge_population(AngularState(column)) >= guard_threshold)
            f.guard_exempt_columns.push_back(j);
        floquet_step_unchecked(column, plan);
        for (int i = 0; i < dim; ++i) f.entries(i, j) = column[static_cast<std::size_t>(i)];
    }
    return f;
}

// Complex Schur form F = Z T Z^H. F is normal, so T is diagonal up to roundoff and the
// Schur vectors are an orthonormal eigenbasis even inside degenerate eigenspaces.
inline FloquetSpectrum diagonalize(const FloquetMatrix& f) {
    const int d = f.dim();
    if (d > max_dense_dimension)
        throw std::invalid_argument("dense diagonalization is capped at D = " +
                                    std::to_string(max_dense_dimension));
    const double defect = unitarity_defect(f.entries);
    if (defect > 1e-8)
        throw Error("matrix is not unitary (max |F^H F - 1| = " + std::to_string(defect) + ")");

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(f.entries, true);
    if (schur.info() != Eigen::Success)
        throw Error("Schur decomposition did not converge (unitarity defect " +
                    std::to_string(defect) + ")");
    const Eigen::MatrixXcd& T = schur.matrixT();
    const Eigen::MatrixXcd& Z = schur.matrixU();

    std::vector<double> phases(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) phases[static_cast<std::size_t>(k)] = wrap_angle(-std::arg(T(k, k)));
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return phases[static_cast<std::size_t>(a)] < phases[static_cast<std::size_t>(b)];
    });

    FloquetSpectrum spec;
    spec.params = f.params;
    spec.eigenphases.resize(static_cast<std::size_t>(d));
    spec.vectors.resize(d, d);
    for (int j = 0; j < d; ++j) {
        const int k = order[static_cast<std::size_t>(j)];
        spec.eigenphases[static_cast<std::size_t>(j)] = phases[static_cast<std::size_t>(k)];
        spec.vectors.row(j) = Z.col(k).adjoint();
    }
    return spec;
}

// sum_k e^{-i phi_k} U*_{ki} U_{kj}
inline Eigen::MatrixXcd reconstruct(const FloquetSpectrum& s) {
    const int d = s.dim();
    Eigen::VectorXcd lambda(d);
    for (int k = 0; k < d; ++k) lambda(k) = std::polar(1.0, -s.eigenphases[static_cast<std::size_t>(k)]);
    return s.vectors.adjoint() * lambda.asDiagonal() * s.vectors;
}

struct SpectralEnergy {
    double total = 0.0;
    double incoherent = 0.0;
    double interference = 0.0;
    double interference_imag = 0.0;  // residual of the "+ c.c." bracket; zero up to roundoff
};

namespace detail {

// Momentum amplitudes of F^N |m>: sum_j e^{-i N phi_j} U*_{jl} U_{jm} over l.
inline Eigen::VectorXcd evolved_basis_state(const FloquetSpectrum& s, int m_index, int N) {
    const int d = s.dim();
    Eigen::VectorXcd coeff(d);
    for (int j = 0; j < d; ++j)
        coeff(j) = std::polar(1.0, -N * s.eigenphases[static_cast<std::size_t>(j)]) * s.vectors(j, m_index);
    return s.vectors.adjoint() * coeff;
}

inline Eigen::VectorXd momentum_squared(const FloquetSpectrum& s) {
    Eigen::VectorXd l2(s.dim());
    for (int i = 0; i < s.dim(); ++i) {
        const double l = i - s.offset();
        l2(i) = l * l;
    }
    return l2;
}

inline void require_momentum(const SuperpositionSpec& init) {
    init.validate();
    if (init.basis_kind != BasisKind::momentum)
        throw std::invalid_argument("spectral energy expansion needs a momentum-basis superposition");
}

}  // namespace detail

// Scaled energy after N kicks split into the cos^2/sin^2 incoherent terms and the
// interference bracket. The triple sums over (l, j, j') factorize through the evolved
// basis states F^N|m> and F^N|n>. With the eigenvector convention above and
// |psi> = cos a|m> + sin a e^{ib}|n>, the bracket carries e^{+ib}.
inline SpectralEnergy energy_via_spectrum(const FloquetSpectrum& s, const SuperpositionSpec& init, int N) {
    detail::require_momentum(init);
    const int im = s.index_of(init.m);
    const int in = s.index_of(init.n);
    const Eigen::VectorXcd psi_m = detail::evolved_basis_state(s, im, N);
    const Eigen::VectorXcd psi_n = detail::evolved_basis_state(s, in, N);
    const Eigen::VectorXd l2 = detail::momentum_squared(s);

    const double ca = std::cos(init.alpha);
    const double sa = std::sin(init.alpha);
    const double mm = (l2.array() * psi_m.array().abs2()).sum();
    const double nn = (l2.array() * psi_n.array().abs2()).sum();
    const cplx cross = (l2.array().cast<cplx>() * psi_m.array().conjugate() * psi_n.array()).sum();
    const cplx bracket = 0.5 * std::sin(2 * init.alpha) * std::polar(1.0, init.beta) * cross;
    const cplx interference = bracket + std::conj(bracket);

    const double scale = s.energy_scale();
    SpectralEnergy e;
    e.incoherent = scale * (ca * ca * mm + sa * sa * nn);
    e.interference = scale * interference.real();
    e.interference_imag = scale * interference.imag();
    e.total = e.incoherent + e.interference;
    return e;
}

// C_lmn = sum_j |U_{jl}|^2 U*_{jm} U_{jn}, indices are momentum labels.
inline cplx eigenvector_correlation(const FloquetSpectrum& s, int l, int m, int n) {
    const int il = s.index_of(l), im = s.index_of(m), in = s.index_of(n);
    cplx acc = 0.0;
    for (int j = 0; j < s.dim(); ++j)
        acc += std::norm(s.vectors(j, il)) * std::conj(s.vectors(j, im)) * s.vectors(j, in);
    return acc;
}

// sum_l l^2 C_lmn over the whole basis.
inline cplx weighted_correlation_sum(const FloquetSpectrum& s, int m, int n) {
    const int im = s.index_of(m), in = s.index_of(n);
    const int d = s.dim();
    Eigen::VectorXcd pair(d);
    for (int j = 0; j < d; ++j) pair(j) = std::conj(s.vectors(j, im)) * s.vectors(j, in);
    // row-vector of sum_j |U_jl|^2 pair_j over l
    const Eigen::RowVectorXcd per_l = pair.transpose() * s.vectors.cwiseAbs2().cast<cplx>();
    const Eigen::VectorXd l2 = detail::momentum_squared(s);
    cplx acc = 0.0;
    for (int l = 0; l < d; ++l) acc += l2(l) * per_l(l);
    return acc;
}

// Long-time (j = j') limit of the interference bracket, in scaled-energy units.
inline double time_averaged_interference(const FloquetSpectrum& s, const SuperpositionSpec& init) {
    detail::require_momentum(init);
    const cplx bracket = 0.5 * std::sin(2 * init.alpha) * std::polar(1.0, init.beta) *
                         weighted_correlation_sum(s, init.m, init.n);
    return s.energy_scale() * 2.0 * bracket.real();
}

// |sum_l l^2 C_lmn| / sum_l l^2 C_lmm: the interference-to-incoherent magnitude ratio.
inline double interference_ratio(const FloquetSpectrum& s, int m, int n) {
    const double incoherent = weighted_correlation_sum(s, m, m).real();
    return std::abs(weighted_correlation_sum(s, m, n)) / incoherent;
}

// Smallest b with |F_ij| < threshold * max|F| whenever the circular index distance
// min(|i-j|, D-|i-j|) exceeds b. The FFT-built matrix is periodic in momentum mod D.
inline int bandwidth_estimate(const FloquetMatrix& f, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    const int d = f.dim();
    const double cut = threshold * f.entries.cwiseAbs().maxCoeff();
    int b = 0;
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            const int dist = std::min(std::abs(i - j), d - std::abs(i - j));
            if (dist > b && std::abs(f.entries(i, j)) >= cut) b = dist;
        }
    return b;
}

struct ControlDiagnostic {
    double k_squared_over_n = 0.0;  // k^2 / N with N = n_kappa / tau
    double effective_dimension = 0.0;
    double k_limit = 0.0;           // 0.2 n_kappa / kappa
    double tau_limit = 0.0;         // kappa^2 / (0.2 n_kappa)
    bool k_form = false;            // k < k_limit
    bool tau_form = false;          // tau > tau_limit
    bool passes = false;
    std::string warning;
};

// Deviation-from-random-matrix predicate for phase control. The banded-matrix size is
// the number of momentum states a tau = 1 grid of n_kappa points covers at this tau.
// The default n_kappa = 250 gives the working rule k < 50/kappa, i.e. tau > kappa^2/50.
inline ControlDiagnostic control_criterion(const SimulationParams& params, int n_kappa = 250) {
    if (n_kappa <= 0) throw std::invalid_argument("n_kappa must be positive");
    ControlDiagnostic d;
    const double kappa = params.kappa();
    d.effective_dimension = n_kappa / params.tau();
    d.k_squared_over_n = params.k() * params.k() / d.effective_dimension;
    d.k_limit = kappa > 0 ? 0.2 * n_kappa / kappa : std::numeric_limits<double>::infinity();
    d.tau_limit = kappa * kappa / (0.2 * n_kappa);
    d.k_form = params.k() < d.k_limit;
    d.tau_form = params.tau() > d.tau_limit;
    d.passes = d.k_squared_over_n < 0.2;
    if (!d.passes)
        d.warning = "k^2/N = " + std::to_string(d.k_squared_over_n) +
                    " >= 0.2: approaching the classical limit, phase control is not expected";
    return d;
}

// exp(iH) for a Hermitian H with i.i.d. standard complex Gaussian entries inside
// |i-j| <= bandwidth, scaled to spectral norm pi.
inline FloquetMatrix banded_random_model(int dim, int bandwidth, std::uint64_t seed) {
    if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("dimension must be even");
    if (bandwidth < 0 || bandwidth >= dim / 2) throw std::invalid_argument("bandwidth must lie in [0, D/2)");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = std::max(0, j - bandwidth); i <= std::min(dim - 1, j + bandwidth); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            a(i, j) = cplx(re, im);
        }
    const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    if (eig.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    const double norm = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double scale = norm > 0 ? pi / norm : 0.0;
    Eigen::VectorXcd phase(dim);
    for (int i = 0; i < dim; ++i) phase(i) = std::polar(1.0, scale * eig.eigenvalues()(i));
    FloquetMatrix f;
    f.entries = eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
    return f;
}

}  // namespace rotorlab
