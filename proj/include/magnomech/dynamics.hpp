#pragma once

// Drift and diffusion of the linearized fluctuation dynamics, covariance
// evolution under  d(sigma)/dt = M sigma + sigma M^T + D,  and its steady state.
//
// Three drift variants are provided:
//   Full        rotating frame, driven by an integrated mean-field trajectory
//   Asymptotic  interaction picture, couplings oscillating at 2*omega_b
//   RWA         interaction picture with the oscillating terms dropped

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "magnomech/core_model.hpp"
#include "magnomech/gaussian.hpp"
#include "magnomech/mean_field.hpp"

namespace magnomech {

class DiffusionMatrix {
public:
    using Diagonal = Eigen::Matrix<double, 6, 1>;

    explicit DiffusionMatrix(const Diagonal& diag) : diag_(diag) {
        for (int i = 0; i < 6; ++i)
            if (!(diag_(i) >= 0.0) || !std::isfinite(diag_(i)))
                throw Error(ErrorKind::InvalidArgument, "diffusion entries must be finite and >= 0");
    }

    const Diagonal& diagonal() const noexcept { return diag_; }
    Mat6 matrix() const { return diag_.asDiagonal(); }

private:
    Diagonal diag_;
};

/// Input-noise diffusion; the phonon entries use the mechanical damping gamma.
inline DiffusionMatrix diffusion(const ValidatedParams& vp) {
    const SystemParams& p = vp.get();
    const double phonon = 0.5 * p.gamma * (2.0 * p.nbar_b + 1.0);
    DiffusionMatrix::Diagonal d;
    d << 0.5 * p.kappa_a, 0.5 * p.kappa_a, phonon, phonon, 0.5 * p.kappa_m, 0.5 * p.kappa_m;
    return DiffusionMatrix(d);
}

enum class DriftVariant { Full, Asymptotic, RWA };

inline std::string_view to_string(DriftVariant v) {
    switch (v) {
        case DriftVariant::Full: return "full";
        case DriftVariant::Asymptotic: return "asymptotic";
        case DriftVariant::RWA: return "rwa";
    }
    return "unknown";
}

class DriftModel {
public:
    static DriftModel rwa(const ValidatedParams& params, const EffectiveCouplings& couplings) {
        require_frame_match(params.get());
        return DriftModel(DriftVariant::RWA, params, couplings, nullptr, std::nullopt);
    }

    static DriftModel asymptotic(const ValidatedParams& params, const EffectiveCouplings& couplings) {
        require_frame_match(params.get());
        std::optional<double> period;
        if (couplings.g1 != Complex{} || couplings.g2 != Complex{})
            period = std::numbers::pi / params->omega_b;
        return DriftModel(DriftVariant::Asymptotic, params, couplings, nullptr, period);
    }

    static DriftModel full(const ValidatedParams& params, std::shared_ptr<const MeanTrajectory> trajectory) {
        if (!trajectory || trajectory->size() < 2)
            throw Error(ErrorKind::InvalidArgument, "full drift needs a mean trajectory with at least two samples");
        return DriftModel(DriftVariant::Full, params, EffectiveCouplings{}, std::move(trajectory), std::nullopt);
    }

    DriftVariant variant() const noexcept { return variant_; }
    const SystemParams& params() const noexcept { return params_.get(); }
    const ValidatedParams& validated_params() const noexcept { return params_; }
    const EffectiveCouplings& couplings() const noexcept { return couplings_; }
    const MeanTrajectory* trajectory() const noexcept { return trajectory_.get(); }
    std::optional<double> period() const noexcept { return period_; }

    /// Drift matrix at time t, dispatching on the variant.
    Mat6 matrix(double t) const;

private:
    DriftModel(DriftVariant v, const ValidatedParams& p, const EffectiveCouplings& c,
               std::shared_ptr<const MeanTrajectory> traj, std::optional<double> period)
        : variant_(v), params_(p), couplings_(c), trajectory_(std::move(traj)), period_(period) {}

    static void require_frame_match(const SystemParams& p) {
        if (std::abs(p.delta_a - p.delta_m) > 1e-12 * std::max(1.0, std::abs(p.delta_a)))
            throw Error(ErrorKind::FrameMismatch, "interaction-picture drift requires delta_a == delta_m", "delta_m");
    }

    DriftVariant variant_;
    ValidatedParams params_;
    EffectiveCouplings couplings_;
    std::shared_ptr<const MeanTrajectory> trajectory_;
    std::optional<double> period_;
};

namespace detail {

using ModeMatrix = Eigen::Matrix<Complex, 3, 3>;
constexpr int A = 0, B = 1, M = 2;  // photon, phonon, magnon

inline void require_variant(const DriftModel& model, DriftVariant v) {
    if (model.variant() != v)
        throw Error(ErrorKind::WrongVariant, "expected a " + std::string(to_string(v)) + " drift model, got " +
                                                 std::string(to_string(model.variant())));
}

// Interaction-picture generator with magnon-phonon coefficients f1 (on b) and f2 (on b^dag).
inline Mat6 interaction_drift(const SystemParams& p, Complex f1, Complex f2) {
    const Complex i(0.0, 1.0);
    ModeMatrix a = ModeMatrix::Zero();
    ModeMatrix b = ModeMatrix::Zero();
    a(A, M) = -i * p.g;
    a(M, A) = -i * p.g;
    a(M, B) = -i * f1;
    b(M, B) = -i * f2;
    a(B, M) = -i * std::conj(f1);
    b(B, M) = -i * f2;
    return quadrature_drift<3>(a, b, {p.kappa_a, p.gamma, p.kappa_m});
}

}  // namespace detail

/// Interaction-picture drift with f1 = G2 + G1 e^{-2i wb t}, f2 = G1 + G2 e^{2i wb t}.
inline Mat6 drift_asymptotic(const DriftModel& model, double t) {
    detail::require_variant(model, DriftVariant::Asymptotic);
    const SystemParams& p = model.params();
    const auto& c = model.couplings();
    const Complex f1 = c.g2 + c.g1 * std::polar(1.0, -2.0 * p.omega_b * t);
    const Complex f2 = c.g1 + c.g2 * std::polar(1.0, 2.0 * p.omega_b * t);
    return detail::interaction_drift(p, f1, f2);
}

/// Time-independent drift of the effective beam-splitter plus two-mode-squeezing Hamiltonian.
inline Mat6 drift_rwa(const DriftModel& model) {
    detail::require_variant(model, DriftVariant::RWA);
    const auto& c = model.couplings();
    return detail::interaction_drift(model.params(), c.g2, c.g1);
}

struct MeanFieldSample {
    Complex m;
    Complex b;
};

/// Linear interpolation of the mean amplitudes inside the trajectory range.
inline MeanFieldSample interpolate_mean_field(const MeanTrajectory& traj, double t) {
    const auto& ts = traj.times;
    if (ts.empty() || t < ts.front() - 1e-12 || t > ts.back() + 1e-12)
        throw Error(ErrorKind::OutOfTrajectoryRange, "time " + std::to_string(t) + " outside mean trajectory");
    auto hi = std::upper_bound(ts.begin(), ts.end(), t);
    if (hi == ts.end()) hi = ts.end() - 1;
    if (hi == ts.begin()) hi = ts.begin() + 1;
    const auto k = static_cast<std::size_t>(hi - ts.begin());
    const double w = std::clamp((t - ts[k - 1]) / (ts[k] - ts[k - 1]), 0.0, 1.0);
    return {(1.0 - w) * traj.m_mean[k - 1] + w * traj.m_mean[k], (1.0 - w) * traj.b_mean[k - 1] + w * traj.b_mean[k]};
}

/// Rotating-frame drift linearized about the mean-field trajectory.
inline Mat6 drift_full(const DriftModel& model, double t) {
    detail::require_variant(model, DriftVariant::Full);
    const SystemParams& p = model.params();
    const MeanTrajectory& traj = *model.trajectory();
    const MeanFieldSample s = interpolate_mean_field(traj, t);
    const Complex G = traj.eta * s.m;
    const double delta_m_eff = traj.bare_delta_m + traj.eta * 2.0 * s.b.real();

    using namespace detail;
    const Complex i(0.0, 1.0);
    ModeMatrix a = ModeMatrix::Zero();
    ModeMatrix b = ModeMatrix::Zero();
    a(A, A) = -i * p.delta_a;
    a(A, M) = -i * p.g;
    a(B, B) = -i * p.omega_b;
    a(B, M) = -i * std::conj(G);
    b(B, M) = -i * G;
    a(M, M) = -i * delta_m_eff;
    a(M, A) = -i * p.g;
    a(M, B) = -i * G;
    b(M, B) = -i * G;
    return quadrature_drift<3>(a, b, {p.kappa_a, p.gamma, p.kappa_m});
}

inline Mat6 DriftModel::matrix(double t) const {
    switch (variant_) {
        case DriftVariant::Full: return drift_full(*this, t);
        case DriftVariant::Asymptotic: return drift_asymptotic(*this, t);
        case DriftVariant::RWA: return drift_rwa(*this);
    }
    return Mat6::Zero();
}

/// Per-mode phase-space rotation taking interaction-picture quadratures to the
/// rotating frame at time t (photon at delta_a, phonon at omega_b, magnon at delta_m).
inline Mat6 interaction_frame_rotation(const SystemParams& p, double t) {
    Mat6 u = Mat6::Zero();
    u.block<2, 2>(0, 0) = mode_rotation(p.delta_a * t);
    u.block<2, 2>(2, 2) = mode_rotation(p.omega_b * t);
    u.block<2, 2>(4, 4) = mode_rotation(p.delta_m * t);
    return u;
}

struct StabilityReport {
    bool stable = false;
    double max_real_part = 0.0;
};

inline constexpr double kStabilityMargin = 1e-12;

template <int N>
StabilityReport stability(const Eigen::Matrix<double, N, N>& m) {
    Eigen::EigenSolver<Eigen::Matrix<double, N, N>> solver(m, false);
    double max_re = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < N; ++k) max_re = std::max(max_re, solver.eigenvalues()[k].real());
    return {max_re < -kStabilityMargin, max_re};
}

struct FloquetReport {
    bool stable = false;
    double max_multiplier = 0.0;  // largest modulus of the monodromy eigenvalues
};

/// Floquet stability of a periodic drift via the RK4 monodromy matrix over one period.
inline FloquetReport floquet_stability(const DriftModel& model, int steps_per_period = 512, double t0 = 0.0) {
    if (!model.period()) {
        const auto s = stability<6>(model.matrix(t0));
        return {s.stable, std::exp(s.max_real_part)};
    }
    const double period = *model.period();
    const double h = period / steps_per_period;
    Mat6 phi = Mat6::Identity();
    for (int n = 0; n < steps_per_period; ++n) {
        const double t = t0 + n * h;
        const Mat6 m0 = model.matrix(t);
        const Mat6 mh = model.matrix(t + 0.5 * h);
        const Mat6 m1 = model.matrix(t + h);
        const Mat6 k1 = m0 * phi;
        const Mat6 k2 = mh * (phi + 0.5 * h * k1);
        const Mat6 k3 = mh * (phi + 0.5 * h * k2);
        const Mat6 k4 = m1 * (phi + h * k3);
        phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Eigen::EigenSolver<Mat6> solver(phi, false);
    double max_mod = 0.0;
    for (int k = 0; k < 6; ++k) max_mod = std::max(max_mod, std::abs(solver.eigenvalues()[k]));
    return {max_mod < 1.0 - 1e-9, max_mod};
}

inline double lyapunov_residual(const Mat6& m, const Mat6& sigma, const DiffusionMatrix& d) {
    return (m * sigma + sigma * m.transpose() + d.matrix()).norm();
}

/// Solves M sigma + sigma M^T + D = 0 through the 36x36 Kronecker-sum system.
inline CovarianceMatrix steady_state(const Mat6& m, const DiffusionMatrix& d) {
    const auto st = stability<6>(m);
    if (!st.stable)
        throw Error(ErrorKind::UnstableDrift,
                    "drift has an eigenvalue with real part " + std::to_string(st.max_real_part));
    using Mat36 = Eigen::Matrix<double, 36, 36>;
    Mat36 k = Mat36::Zero();
    // column-major vec: vec(M X) = (I (x) M) vec X, vec(X M^T) = (M (x) I) vec X
    for (int c = 0; c < 6; ++c) k.block<6, 6>(6 * c, 6 * c) += m;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) k.block<6, 6>(6 * r, 6 * c).diagonal().array() += m(r, c);
    const Mat6 dm = d.matrix();
    const Eigen::Matrix<double, 36, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, 36, 1>>(dm.data());
    const Eigen::Matrix<double, 36, 1> x = k.fullPivLu().solve(rhs);
    CovarianceMatrix sigma(Eigen::Map<const Mat6>(x.data()));
    if (!sigma.matrix().allFinite()) throw Error(ErrorKind::NonFinite, "steady-state solve produced non-finite entries");
    const auto phys = physicality_check(sigma);
    if (!phys.physical)
        throw Error(ErrorKind::UnphysicalState,
                    "steady state violates the uncertainty bound (min symplectic eigenvalue " +
                        std::to_string(phys.min_symplectic_eig) + ")");
    return sigma;
}

/// Relaxation time used to decide when transients are over: 8 / |max Re lambda(M_rwa)|.
inline double transient_cutoff(const Mat6& rwa_drift) {
    const auto st = stability<6>(rwa_drift);
    if (!st.stable) throw Error(ErrorKind::UnstableDrift, "transient cutoff needs a stable RWA drift");
    return 8.0 / std::abs(st.max_real_part);
}

struct CovarianceTrajectory {
    std::vector<double> times;
    std::vector<CovarianceMatrix> samples;
    std::vector<double> min_symplectic_eig;

    std::size_t size() const noexcept { return times.size(); }
};

struct EvolveOptions {
    double t_start = 0.0;
    double record_from = 0.0;    // absolute time; earlier samples are dropped
    std::size_t sample_every = 1;
    bool check_physicality = true;
};

/// Largest step accepted by evolve_covariance for the model's variant (infinity for RWA).
inline double max_covariance_step(const DriftModel& model) {
    const SystemParams& p = model.params();
    switch (model.variant()) {
        case DriftVariant::Asymptotic: return (std::numbers::pi / p.omega_b) / 50.0;
        case DriftVariant::Full:
            return (2.0 * std::numbers::pi / std::max(std::abs(p.delta_a), p.omega_b)) / 50.0;
        case DriftVariant::RWA: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

namespace detail {

// Fixed-step RK4 on the Lyapunov ODE; drift_at(t) supplies M(t).
template <class DriftAt>
CovarianceTrajectory integrate_lyapunov(DriftAt drift_at, bool constant, const DiffusionMatrix& d,
                                        const CovarianceMatrix& sigma0, double t_end, double dt,
                                        const EvolveOptions& opts) {
    const Mat6 dm = d.matrix();
    const Mat6 m_const = constant ? drift_at(opts.t_start) : Mat6::Zero();
    const auto rhs = [&](const Mat6& m, const Mat6& s) -> Mat6 {
        const Mat6 ms = m * s;
        return ms + ms.transpose() + dm;
    };

    const auto steps = static_cast<std::size_t>(std::ceil((t_end - opts.t_start) / dt - 1e-9));
    CovarianceTrajectory out;
    const std::size_t expected = steps / opts.sample_every + 2;
    out.times.reserve(expected);
    out.samples.reserve(expected);
    out.min_symplectic_eig.reserve(expected);

    Mat6 s = sigma0.matrix();
    const auto record = [&](std::size_t step, double t) {
        if (step % opts.sample_every != 0 || t + 1e-12 < opts.record_from) return;
        const CovarianceMatrix cm(s);
        double min_eig = 0.0;
        if (opts.check_physicality) {
            const auto phys = physicality_check(cm);
            if (!phys.physical)
                throw Error(ErrorKind::UnphysicalState, "sample at t = " + std::to_string(t) +
                                                            " has min symplectic eigenvalue " +
                                                            std::to_string(phys.min_symplectic_eig));
            min_eig = phys.min_symplectic_eig;
        } else {
            min_eig = symplectic_eigenvalues<6>(cm.matrix())[0];
        }
        out.times.push_back(t);
        out.samples.push_back(cm);
        out.min_symplectic_eig.push_back(min_eig);
    };

    record(0, opts.t_start);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = opts.t_start + static_cast<double>(n) * dt;
        const Mat6 m0 = constant ? m_const : drift_at(t);
        const Mat6 mh = constant ? m_const : drift_at(t + 0.5 * dt);
        const Mat6 m1 = constant ? m_const : drift_at(t + dt);
        const Mat6 k1 = rhs(m0, s);
        const Mat6 k2 = rhs(mh, s + 0.5 * dt * k1);
        const Mat6 k3 = rhs(mh, s + 0.5 * dt * k2);
        const Mat6 k4 = rhs(m1, s + dt * k3);
        s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s = 0.5 * (s + s.transpose()).eval();
        if (!s.allFinite()) throw Error(ErrorKind::NonFinite, "covariance overflowed at t = " + std::to_string(t + dt));
        record(n + 1, opts.t_start + static_cast<double>(n + 1) * dt);
    }
    return out;
}

inline void check_evolve_args(double t_end, double dt, const EvolveOptions& opts) {
    if (!(dt > 0.0) || !(t_end > opts.t_start))
        throw Error(ErrorKind::InvalidArgument, "need dt > 0 and t_end > t_start");
    if (opts.sample_every == 0) throw Error(ErrorKind::InvalidArgument, "sample_every must be >= 1");
}

}  // namespace detail

/// Fixed-step RK4 integration of the Lyapunov ODE, symmetrizing after every step.
inline CovarianceTrajectory evolve_covariance(const DriftModel& model, const DiffusionMatrix& d,
                                              const CovarianceMatrix& sigma0, double t_end, double dt,
                                              const EvolveOptions& opts = {}) {
    detail::check_evolve_args(t_end, dt, opts);
    if (dt > max_covariance_step(model) * (1.0 + 1e-12))
        throw Error(ErrorKind::StepTooLarge, "dt does not resolve the fastest coefficient oscillation", "dt");
    return detail::integrate_lyapunov([&](double t) { return model.matrix(t); },
                                      model.variant() == DriftVariant::RWA, d, sigma0, t_end, dt, opts);
}

/// Same integrator for an arbitrary constant drift matrix.
inline CovarianceTrajectory evolve_covariance(const Mat6& m, const DiffusionMatrix& d, const CovarianceMatrix& sigma0,
                                              double t_end, double dt, const EvolveOptions& opts = {}) {
    detail::check_evolve_args(t_end, dt, opts);
    if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "drift matrix has non-finite entries");
    return detail::integrate_lyapunov([&](double) { return m; }, true, d, sigma0, t_end, dt, opts);
}

}  // namespace magnomech
