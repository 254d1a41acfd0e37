#pragma once

// Grid sweep over (gamma, nbar_b) with per-period peak extraction.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "magnomech/dynamics.hpp"
#include "magnomech/measures.hpp"

namespace magnomech {

struct SweepGrid {
    std::vector<double> gamma_values;
    std::vector<double> nbar_values;
    SystemParams base;
    EffectiveCouplings couplings;
    DriftVariant model_variant = DriftVariant::RWA;

    std::size_t size() const noexcept { return gamma_values.size() * nbar_values.size(); }
};

/// gamma in {0.005, ..., 0.1} (20 points), nbar_b in {0, 0.5, ..., 10} (21 points).
inline SweepGrid default_reference_grid(const SystemParams& base, const EffectiveCouplings& couplings,
                                      DriftVariant variant = DriftVariant::RWA) {
    SweepGrid grid;
    for (int k = 1; k <= 20; ++k) grid.gamma_values.push_back(0.005 * k);
    for (int k = 0; k <= 20; ++k) grid.nbar_values.push_back(0.5 * k);
    grid.base = base;
    grid.couplings = couplings;
    grid.model_variant = variant;
    return grid;
}

inline void validate_grid(const SweepGrid& grid) {
    const auto increasing = [](const std::vector<double>& v, const char* name) {
        if (v.empty()) throw Error(ErrorKind::ConfigError, std::string(name) + " must not be empty", name);
        for (std::size_t k = 1; k < v.size(); ++k)
            if (!(v[k] > v[k - 1]))
                throw Error(ErrorKind::ConfigError, std::string(name) + " must be strictly increasing", name);
    };
    increasing(grid.gamma_values, "gamma_values");
    increasing(grid.nbar_values, "nbar_values");
    if (!(grid.gamma_values.front() > 0.0))
        throw Error(ErrorKind::NonPositiveRate, "gamma values must be > 0", "gamma_values");
    if (grid.nbar_values.front() < 0.0)
        throw Error(ErrorKind::NegativeOccupation, "nbar values must be >= 0", "nbar_values");
    if (grid.model_variant == DriftVariant::Full)
        throw Error(ErrorKind::ConfigError, "sweeps support the asymptotic and rwa variants only", "model_variant");
    validate(grid.base);
}

inline constexpr int kSamplesPerPeriod = 64;
inline constexpr double kPeakConvergenceTol = 1e-3;

/// Maximum of a periodically-stationary series over its last complete period
/// after t_start. Fails unless the previous period's maximum agrees to 1e-3.
inline double peak_per_period(std::span<const double> times, std::span<const double> values, double period,
                              double t_start) {
    if (times.size() != values.size())
        throw Error(ErrorKind::InvalidArgument, "times and values differ in length");
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be > 0");
    const auto first = std::lower_bound(times.begin(), times.end(), t_start - 1e-12);
    if (first == times.end() || times.size() < 2)
        throw Error(ErrorKind::InsufficientSamples, "no samples after t_start");
    const std::size_t i0 = static_cast<std::size_t>(first - times.begin());
    const double span = times.back() - t_start;
    const auto full_periods = static_cast<long>(std::floor(span / period + 1e-9));
    if (full_periods < 3)
        throw Error(ErrorKind::InsufficientSamples, "need at least 3 full periods after t_start");
    const std::size_t count = times.size() - i0;
    const double density = static_cast<double>(count - 1) / ((times.back() - times[i0]) / period);
    if (density < kSamplesPerPeriod - 1e-6)
        throw Error(ErrorKind::InsufficientSamples, "need at least 64 samples per period");

    const auto window_max = [&](long k) {
        const double lo = t_start + static_cast<double>(k) * period;
        const double hi = lo + period;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = i0; i < times.size(); ++i) {
            if (times[i] < lo - 1e-12) continue;
            if (times[i] >= hi - 1e-12) break;
            best = std::max(best, values[i]);
        }
        return best;
    };
    const double last = window_max(full_periods - 1);
    const double prev = window_max(full_periods - 2);
    const double diff = std::abs(last - prev);
    if (diff > 1e-12 && diff > kPeakConvergenceTol * std::max(std::abs(last), std::abs(prev)))
        throw Error(ErrorKind::NotConverged,
                    "consecutive period peaks differ: " + std::to_string(prev) + " vs " + std::to_string(last));
    return last;
}

struct SweepResult {
    double gamma = 0.0;
    double nbar = 0.0;
    std::optional<double> peak_e_n;
    std::optional<double> peak_g_a;
    std::optional<double> peak_g_b;
    bool stable = false;
    std::optional<SteeringRegime> regime;
    std::string error;  // empty when the point completed
};

struct PeakMeasures {
    double e_n, g_a, g_b;
};

/// Per-period peaks of E_N, G_A, G_B for a periodic asymptotic model started
/// from vacuum photon/magnon and thermal phonon.
inline PeakMeasures asymptotic_peaks(const DriftModel& model, const DiffusionMatrix& d, double t_cutoff,
                                     int periods_after_cutoff = 4) {
    const double period = model.period().value_or(std::numbers::pi / model.params().omega_b);
    const double dt = period / (2 * kSamplesPerPeriod);
    EvolveOptions opts;
    opts.sample_every = 2;
    opts.record_from = t_cutoff;
    const double t_end = t_cutoff + periods_after_cutoff * period + 2.0 * dt;
    const auto traj =
        evolve_covariance(model, d, default_initial_state(model.params().nbar_b), t_end, dt, opts);
    std::vector<double> en, ga, gb;
    en.reserve(traj.size());
    ga.reserve(traj.size());
    gb.reserve(traj.size());
    for (const auto& s : traj.samples) {
        const auto m = compute_measures(s);
        en.push_back(m.e_n);
        ga.push_back(m.g_a);
        gb.push_back(m.g_b);
    }
    return {peak_per_period(traj.times, en, period, t_cutoff), peak_per_period(traj.times, ga, period, t_cutoff),
            peak_per_period(traj.times, gb, period, t_cutoff)};
}

/// 8 / rate for the slower of the RWA spectral gap and the Floquet decay rate
/// of the periodic model.
inline double asymptotic_transient_cutoff(const DriftModel& model, const FloquetReport& floquet,
                                          const StabilityReport& rwa) {
    const double period = model.period().value_or(std::numbers::pi / model.params().omega_b);
    double rate = -std::log(floquet.max_multiplier) / period;
    if (rwa.stable) rate = std::min(rate, std::abs(rwa.max_real_part));
    if (!(rate > 0.0)) throw Error(ErrorKind::UnstableDrift, "periodic model does not decay");
    return 8.0 / rate;
}

inline SweepResult compute_sweep_point(const SweepGrid& grid, std::size_t gamma_index, std::size_t nbar_index) {
    SweepResult r;
    r.gamma = grid.gamma_values[gamma_index];
    r.nbar = grid.nbar_values[nbar_index];
    try {
        SystemParams p = grid.base;
        p.gamma = r.gamma;
        p.nbar_b = r.nbar;
        const ValidatedParams vp = validate(p);
        const DiffusionMatrix d = diffusion(vp);
        const Mat6 m_rwa = drift_rwa(DriftModel::rwa(vp, grid.couplings));
        const auto rwa_stability = stability<6>(m_rwa);

        PeakMeasures peaks{};
        if (grid.model_variant == DriftVariant::RWA) {
            r.stable = rwa_stability.stable;
            if (!r.stable) return r;
            const auto m = compute_measures(steady_state(m_rwa, d));
            peaks = {m.e_n, m.g_a, m.g_b};
        } else {
            const DriftModel model = DriftModel::asymptotic(vp, grid.couplings);
            const auto floquet = floquet_stability(model);
            r.stable = floquet.stable;
            if (!r.stable) return r;
            peaks = asymptotic_peaks(model, d, asymptotic_transient_cutoff(model, floquet, rwa_stability));
        }
        r.peak_e_n = peaks.e_n;
        r.peak_g_a = peaks.g_a;
        r.peak_g_b = peaks.g_b;
        r.regime = classify_steering(peaks.g_a, peaks.g_b);
    } catch (const Error& e) {
        r.error = e.what();
        r.peak_e_n.reset();
        r.peak_g_a.reset();
        r.peak_g_b.reset();
        r.regime.reset();
    }
    return r;
}

/// Row-major over (gamma, nbar): index = gamma_index * nbar_count + nbar_index.
/// Output order and values do not depend on the worker count.
inline std::vector<SweepResult> run_sweep(const SweepGrid& grid, unsigned threads = 1) {
    validate_grid(grid);
    const std::size_t n_nbar = grid.nbar_values.size();
    std::vector<SweepResult> results(grid.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < results.size(); k = next++)
            results[k] = compute_sweep_point(grid, k / n_nbar, k % n_nbar);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(results.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return results;
}

}  // namespace magnomech
