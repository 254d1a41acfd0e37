#pragma once

// Classical mean amplitudes under the two-tone magnon drive, their asymptotic
// (single-harmonic-per-tone) solution, and the effective linearized couplings
// with the derived Bogoliubov squeezing parameters.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "magnomech/core_model.hpp"

namespace magnomech {

struct MeanTrajectory {
    std::vector<double> times;
    std::vector<Complex> a_mean;
    std::vector<Complex> b_mean;
    std::vector<Complex> m_mean;
    /// Bare magnon detuning used in the integration; the effective detuning is
    /// bare_delta_m + eta * 2 Re<b(t)>.
    double bare_delta_m = 0.0;
    double eta = 0.0;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

/// A derived quantity that only exists inside a domain; `condition` names the
/// domain and is reported when the value is undefined.
struct DerivedValue {
    std::optional<double> value;
    std::string condition;

    bool defined() const noexcept { return value.has_value(); }
};

struct EffectiveCouplings {
    Complex g1{};
    Complex g2{};
    DerivedValue r1;   // atanh(|G1|/|G2|)
    DerivedValue r2;   // atanh(|G1|/g)
    DerivedValue gt1;  // sqrt(|G2|^2 - |G1|^2)
    DerivedValue gt2;  // sqrt(g^2 - |G1|^2)
};

namespace detail {

// Linear magnon response to a tone at frequency omega, with the cavity
// adiabatically folded in.
inline Complex magnon_response_denominator(const SystemParams& p, double omega) {
    const Complex i(0.0, 1.0);
    return 0.5 * p.kappa_m + i * (p.delta_m - omega) + p.g * p.g / (0.5 * p.kappa_a + i * (p.delta_a - omega));
}

inline double max_rotating_frequency(const SystemParams& p) {
    const double w1 = blue_tone_frequency(p);
    const double w2 = red_tone_frequency(p);
    return std::max({std::abs(p.delta_a + w1), std::abs(p.delta_a - w1), std::abs(p.delta_a + w2),
                     std::abs(p.delta_a - w2), p.omega_b});
}

inline void require_amplitudes(const DriveConfig& drive) {
    if (drive.mode != DriveMode::Amplitudes)
        throw Error(ErrorKind::InvalidArgument, "operation requires a drive given by amplitudes", "drive.mode");
}

}  // namespace detail

/// Bare magnon detuning that places the effective detuning (after the static
/// radiation-pressure-like shift from <b>) at params.delta_m, using the
/// time-averaged |<m>|^2 of the asymptotic solution.
inline double self_consistent_bare_detuning(const ValidatedParams& vp, const DriveConfig& drive) {
    detail::require_amplitudes(drive);
    const SystemParams& p = vp.get();
    const double m1 = drive.e1 / std::abs(detail::magnon_response_denominator(p, blue_tone_frequency(p)));
    const double m2 = drive.e2 / std::abs(detail::magnon_response_denominator(p, red_tone_frequency(p)));
    const double mean_sq = m1 * m1 + m2 * m2;
    const double shift = -2.0 * p.eta * p.eta * mean_sq * p.omega_b / (0.25 * p.gamma * p.gamma + p.omega_b * p.omega_b);
    return p.delta_m - shift;
}

/// Largest admissible step for integrate_mean_field.
inline double max_mean_field_step(const SystemParams& p) {
    return std::numbers::pi / (50.0 * detail::max_rotating_frequency(p));
}

struct MeanFieldOptions {
    double record_from = 0.0;       // samples before this time are not stored
    std::size_t record_stride = 1;  // store every n-th step
    Complex a0{}, b0{}, m0{};
    std::optional<double> bare_delta_m;  // default: self_consistent_bare_detuning
};

/// Fixed-step RK4 integration of the nonlinear mean-value equations from t = 0.
inline MeanTrajectory integrate_mean_field(const ValidatedParams& vp, const DriveConfig& drive, double t_end,
                                           double dt, const MeanFieldOptions& opts = {}) {
    detail::require_amplitudes(drive);
    const SystemParams& p = vp.get();
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw Error(ErrorKind::InvalidArgument, "t_end and dt must be > 0");
    const double dt_max = max_mean_field_step(p);
    if (dt > dt_max * (1.0 + 1e-12))
        throw Error(ErrorKind::StepTooLarge,
                    "dt = " + std::to_string(dt) + " exceeds pi/(50*omega_osc) = " + std::to_string(dt_max), "dt");
    if (opts.record_stride == 0) throw Error(ErrorKind::InvalidArgument, "record_stride must be >= 1");

    const Complex i(0.0, 1.0);
    const double bare = opts.bare_delta_m.value_or(drive.e1 == 0.0 && drive.e2 == 0.0
                                                       ? p.delta_m
                                                       : self_consistent_bare_detuning(vp, drive));
    const double w1 = blue_tone_frequency(p);
    const double w2 = red_tone_frequency(p);

    using State = std::array<Complex, 3>;
    const auto drive_at = [&](double t) {
        Complex e{};
        if (drive.e1 != 0.0) e += drive.e1 * std::polar(1.0, -w1 * t);
        if (drive.e2 != 0.0) e += drive.e2 * std::polar(1.0, -w2 * t);
        return e;
    };
    const auto rhs = [&](double t, const State& y) {
        const Complex& a = y[0];
        const Complex& b = y[1];
        const Complex& m = y[2];
        const double b_sum = 2.0 * b.real();
        return State{
            -(0.5 * p.kappa_a + i * p.delta_a) * a - i * p.g * m,
            -(0.5 * p.gamma + i * p.omega_b) * b - i * p.eta * std::norm(m),
            -(0.5 * p.kappa_m + i * bare) * m - i * p.g * a - i * p.eta * m * b_sum + drive_at(t),
        };
    };
    const auto axpy = [](const State& y, double h, const State& k) {
        return State{y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]};
    };

    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    MeanTrajectory traj;
    traj.bare_delta_m = bare;
    traj.eta = p.eta;
    const double first_recorded = std::max(0.0, opts.record_from);
    const std::size_t expected =
        static_cast<std::size_t>(std::max(0.0, (t_end - first_recorded) / dt)) / opts.record_stride + 2;
    traj.times.reserve(expected);
    traj.a_mean.reserve(expected);
    traj.b_mean.reserve(expected);
    traj.m_mean.reserve(expected);

    State y{opts.a0, opts.b0, opts.m0};
    const auto record = [&](std::size_t step, double t) {
        if (t + 1e-12 < opts.record_from || step % opts.record_stride != 0) return;
        traj.times.push_back(t);
        traj.a_mean.push_back(y[0]);
        traj.b_mean.push_back(y[1]);
        traj.m_mean.push_back(y[2]);
    };
    record(0, 0.0);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const State k1 = rhs(t, y);
        const State k2 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
        const State k3 = rhs(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
        const State k4 = rhs(t + dt, axpy(y, dt, k3));
        for (int c = 0; c < 3; ++c) y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        if (!std::isfinite(std::norm(y[0])) || !std::isfinite(std::norm(y[1])) || !std::isfinite(std::norm(y[2])))
            throw Error(ErrorKind::NonFinite, "mean amplitudes overflowed at t = " + std::to_string(t + dt));
        record(n + 1, static_cast<double>(n + 1) * dt);
    }
    return traj;
}

/// Asymptotic magnon amplitude: one steady harmonic per drive tone.
inline Complex asymptotic_magnon_amplitude(const ValidatedParams& vp, const DriveConfig& drive, double t) {
    detail::require_amplitudes(drive);
    const SystemParams& p = vp.get();
    Complex m{};
    const double w1 = blue_tone_frequency(p);
    const double w2 = red_tone_frequency(p);
    if (drive.e1 != 0.0) m += drive.e1 * std::polar(1.0, -w1 * t) / detail::magnon_response_denominator(p, w1);
    if (drive.e2 != 0.0) m += drive.e2 * std::polar(1.0, -w2 * t) / detail::magnon_response_denominator(p, w2);
    return m;
}

inline EffectiveCouplings effective_couplings(const ValidatedParams& vp, const DriveConfig& drive) {
    const SystemParams& p = vp.get();
    EffectiveCouplings c;
    if (drive.mode == DriveMode::Couplings) {
        c.g1 = drive.g1;
        c.g2 = drive.g2;
    } else {
        c.g1 = p.eta * drive.e1 / detail::magnon_response_denominator(p, blue_tone_frequency(p));
        c.g2 = p.eta * drive.e2 / detail::magnon_response_denominator(p, red_tone_frequency(p));
    }
    const double a1 = std::abs(c.g1);
    const double a2 = std::abs(c.g2);

    c.r1.condition = "|G1| < |G2|";
    c.gt1.condition = "|G1| < |G2|";
    if (a1 < a2) {
        c.r1.value = std::atanh(a1 / a2);
        c.gt1.value = std::sqrt(a2 * a2 - a1 * a1);
    }
    c.r2.condition = "|G1| < g";
    c.gt2.condition = "|G1| < g";
    if (a1 < p.g) {
        c.r2.value = std::atanh(a1 / p.g);
        c.gt2.value = std::sqrt(p.g * p.g - a1 * a1);
    }
    return c;
}

/// Blue-tone amplitude E_1 that yields |G_1| = target_g1.
inline double drive_amplitude_for_target_coupling(const ValidatedParams& vp, double target_g1) {
    if (!(target_g1 >= 0.0) || !std::isfinite(target_g1))
        throw Error(ErrorKind::InvalidArgument, "target coupling must be finite and >= 0", "target_g1");
    if (target_g1 == 0.0) return 0.0;
    const SystemParams& p = vp.get();
    if (p.eta == 0.0) throw Error(ErrorKind::ZeroEta, "eta = 0 cannot produce a nonzero coupling", "eta");
    return target_g1 * std::abs(detail::magnon_response_denominator(p, blue_tone_frequency(p))) / p.eta;
}

}  // namespace magnomech
