#pragma once

// System parameters of the linearized cavity-magnomechanical model.
//
// All frequencies and rates are dimensionless, in units of the mechanical
// frequency omega_b (which is therefore exactly 1). Time is measured in
// units of 1/omega_b.

#include <cmath>
#include <complex>
#include <string>

#include "magnomech/error.hpp"

namespace magnomech {

using Complex = std::complex<double>;

struct SystemParams {
    double delta_a = 0.0;   // cavity detuning omega_a - omega_d
    double delta_m = 0.0;   // effective magnon detuning (includes the static mechanical shift)
    double omega_b = 1.0;   // mechanical frequency, the unit
    double g = 0.0;         // cavity-magnon coupling
    double eta = 0.0;       // bare magnetostrictive coupling
    double kappa_a = 1.0;   // cavity dissipation
    double kappa_m = 1.0;   // magnon dissipation
    double gamma = 1.0;     // mechanical dissipation
    double nbar_b = 0.0;    // thermal phonon number of the mechanical bath

    bool operator==(const SystemParams&) const = default;
};

/// Reference operating point used by the sweep defaults, samples and tests:
/// Delta_a = Delta_m = 1000, kappa_a = 0.02, kappa_m = 0.3, g = 0.28,
/// eta = 2e-8, gamma = 0.02, nbar_b = 0.
inline SystemParams reference_params() {
    SystemParams p;
    p.delta_a = 1000.0;
    p.delta_m = 1000.0;
    p.omega_b = 1.0;
    p.g = 0.28;
    p.eta = 2e-8;
    p.kappa_a = 0.02;
    p.kappa_m = 0.3;
    p.gamma = 0.02;
    p.nbar_b = 0.0;
    return p;
}

/// Parameters that passed validate(). Only validate() can produce one.
class ValidatedParams {
public:
    const SystemParams& get() const noexcept { return params_; }
    const SystemParams* operator->() const noexcept { return &params_; }
    operator const SystemParams&() const noexcept { return params_; }

    bool operator==(const ValidatedParams&) const = default;

private:
    explicit ValidatedParams(const SystemParams& p) : params_(p) {}
    friend ValidatedParams validate(const SystemParams& params);

    SystemParams params_;
};

inline ValidatedParams validate(const SystemParams& params) {
    const auto finite = [](double v, const char* name) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, std::string(name) + " is not finite", name);
    };
    finite(params.delta_a, "delta_a");
    finite(params.delta_m, "delta_m");
    finite(params.omega_b, "omega_b");
    finite(params.g, "g");
    finite(params.eta, "eta");
    finite(params.kappa_a, "kappa_a");
    finite(params.kappa_m, "kappa_m");
    finite(params.gamma, "gamma");
    finite(params.nbar_b, "nbar_b");

    if (params.omega_b != 1.0)
        throw Error(ErrorKind::InvalidUnit, "omega_b must be exactly 1 (it is the frequency unit)", "omega_b");

    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw Error(ErrorKind::NonPositiveRate, std::string(name) + " must be > 0", name);
    };
    positive(params.kappa_a, "kappa_a");
    positive(params.kappa_m, "kappa_m");
    positive(params.gamma, "gamma");

    if (params.g < 0.0) throw Error(ErrorKind::NegativeCoupling, "g must be >= 0", "g");
    if (params.eta < 0.0) throw Error(ErrorKind::NegativeCoupling, "eta must be >= 0", "eta");
    if (params.nbar_b < 0.0) throw Error(ErrorKind::NegativeOccupation, "nbar_b must be >= 0", "nbar_b");

    return ValidatedParams(params);
}

inline ValidatedParams validate(const ValidatedParams& params) { return params; }

/// Bose-Einstein occupation 1/(e^x - 1) for x = hbar*omega_b/(k_B T).
inline double thermal_occupation(double x) {
    if (!(x > 0.0)) throw Error(ErrorKind::NonPositiveRatio, "hbar*omega/(k_B T) must be > 0", "x");
    return 1.0 / std::expm1(x);
}

enum class DriveMode { Amplitudes, Couplings };

/// Two-tone magnon drive. Tone 1 is blue detuned (omega_1 = Delta_m + omega_b),
/// tone 2 red detuned (omega_2 = Delta_m - omega_b). In Couplings mode the
/// effective couplings are prescribed directly and the amplitudes are ignored.
struct DriveConfig {
    DriveMode mode = DriveMode::Couplings;
    double e1 = 0.0;
    double e2 = 0.0;
    Complex g1{0.0, 0.0};
    Complex g2{0.0, 0.0};

    static DriveConfig amplitudes(double e1, double e2 = 0.0) {
        if (!(e1 >= 0.0) || !(e2 >= 0.0) || !std::isfinite(e1) || !std::isfinite(e2))
            throw Error(ErrorKind::InvalidArgument, "drive amplitudes must be finite and >= 0");
        DriveConfig d;
        d.mode = DriveMode::Amplitudes;
        d.e1 = e1;
        d.e2 = e2;
        return d;
    }

    static DriveConfig couplings(Complex g1, Complex g2 = {}) {
        if (!std::isfinite(g1.real()) || !std::isfinite(g1.imag()) || !std::isfinite(g2.real()) ||
            !std::isfinite(g2.imag()))
            throw Error(ErrorKind::InvalidArgument, "effective couplings must be finite");
        DriveConfig d;
        d.mode = DriveMode::Couplings;
        d.g1 = g1;
        d.g2 = g2;
        return d;
    }
};

inline double blue_tone_frequency(const SystemParams& p) { return p.delta_m + p.omega_b; }
inline double red_tone_frequency(const SystemParams& p) { return p.delta_m - p.omega_b; }

}  // namespace magnomech
