#pragma once

// Run configuration (JSON) and dispatch of the four run modes.

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "magnomech/dynamics.hpp"
#include "magnomech/io.hpp"
#include "magnomech/mean_field.hpp"
#include "magnomech/measures.hpp"
#include "magnomech/sweep.hpp"

namespace magnomech::cli {

enum class RunMode { Steady, Evolve, Sweep, Couplings };

struct RunConfig {
    RunMode mode = RunMode::Steady;
    SystemParams params;
    DriveConfig drive;
    // sweep
    std::optional<std::vector<double>> gamma_values;
    std::optional<std::vector<double>> nbar_values;
    DriftVariant model_variant = DriftVariant::RWA;
    // evolve
    double t_end = 0.0;
    double dt = 0.0;
    std::size_t sample_every = 1;
    std::string output_path;  // empty: standard output
    io::Format output_format = io::Format::Csv;
};

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kInstability = 3, kNumericalFailure = 4 };

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ConfigError:
        case ErrorKind::NonPositiveRate:
        case ErrorKind::NegativeOccupation:
        case ErrorKind::NegativeCoupling:
        case ErrorKind::InvalidUnit:
        case ErrorKind::NonPositiveRatio:
        case ErrorKind::StepTooLarge:
        case ErrorKind::ZeroEta:
        case ErrorKind::FrameMismatch:
        case ErrorKind::WrongVariant:
        case ErrorKind::InvalidArgument:
            return kConfigError;
        case ErrorKind::UnstableDrift:
            return kInstability;
        default:
            return kNumericalFailure;
    }
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key))
            throw Error(ErrorKind::ConfigError, "unknown field '" + key + "' in " + where, key);
}

inline double get_real(const json& obj, const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw Error(ErrorKind::ConfigError, "missing field '" + key + "'", key);
    }
    if (!obj[key].is_number()) throw Error(ErrorKind::ConfigError, "field '" + key + "' must be a number", key);
    return obj[key].get<double>();
}

inline std::vector<double> get_reals(const json& obj, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_array()) throw Error(ErrorKind::ConfigError, "field '" + key + "' must be an array", key);
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw Error(ErrorKind::ConfigError, "field '" + key + "' must hold numbers", key);
        out.push_back(x.get<double>());
    }
    return out;
}

inline std::string get_string(const json& obj, const std::string& key, std::optional<std::string> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw Error(ErrorKind::ConfigError, "missing field '" + key + "'", key);
    }
    if (!obj[key].is_string()) throw Error(ErrorKind::ConfigError, "field '" + key + "' must be a string", key);
    return obj[key].get<std::string>();
}

inline DriftVariant parse_variant(const std::string& s) {
    if (s == "rwa") return DriftVariant::RWA;
    if (s == "asymptotic") return DriftVariant::Asymptotic;
    throw Error(ErrorKind::ConfigError, "model_variant must be 'rwa' or 'asymptotic'", "model_variant");
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    using namespace detail;
    if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
    reject_unknown(j,
                   {"mode", "params", "drive", "grid", "model_variant", "t_end", "dt", "sample_every", "output_path",
                    "output_format"},
                   "config");
    RunConfig c;
    const std::string mode = get_string(j, "mode");
    if (mode == "steady") c.mode = RunMode::Steady;
    else if (mode == "evolve") c.mode = RunMode::Evolve;
    else if (mode == "sweep") c.mode = RunMode::Sweep;
    else if (mode == "couplings") c.mode = RunMode::Couplings;
    else throw Error(ErrorKind::ConfigError, "mode must be steady, evolve, sweep or couplings", "mode");

    if (!j.contains("params") || !j["params"].is_object())
        throw Error(ErrorKind::ConfigError, "missing object 'params'", "params");
    const json& p = j["params"];
    reject_unknown(p, {"delta_a", "delta_m", "omega_b", "g", "eta", "kappa_a", "kappa_m", "gamma", "nbar_b"},
                   "params");
    c.params.delta_a = get_real(p, "delta_a");
    c.params.delta_m = get_real(p, "delta_m");
    c.params.omega_b = get_real(p, "omega_b", 1.0);
    c.params.g = get_real(p, "g");
    c.params.eta = get_real(p, "eta", 0.0);
    c.params.kappa_a = get_real(p, "kappa_a");
    c.params.kappa_m = get_real(p, "kappa_m");
    c.params.gamma = get_real(p, "gamma");
    c.params.nbar_b = get_real(p, "nbar_b", 0.0);

    if (!j.contains("drive") || !j["drive"].is_object())
        throw Error(ErrorKind::ConfigError, "missing object 'drive'", "drive");
    const json& d = j["drive"];
    reject_unknown(d, {"mode", "e1", "e2", "g1", "g2"}, "drive");
    const std::string dmode = get_string(d, "mode");
    if (dmode == "amplitudes") {
        c.drive = DriveConfig::amplitudes(get_real(d, "e1", 0.0), get_real(d, "e2", 0.0));
    } else if (dmode == "couplings") {
        const double g1 = get_real(d, "g1", 0.0);
        const double g2 = get_real(d, "g2", 0.0);
        if (g1 < 0.0 || g2 < 0.0) throw Error(ErrorKind::ConfigError, "couplings must be >= 0", "drive");
        c.drive = DriveConfig::couplings(g1, g2);
    } else {
        throw Error(ErrorKind::ConfigError, "drive.mode must be 'amplitudes' or 'couplings'", "drive.mode");
    }

    if (j.contains("model_variant")) c.model_variant = parse_variant(get_string(j, "model_variant"));
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) throw Error(ErrorKind::ConfigError, "'grid' must be an object", "grid");
        reject_unknown(g, {"gamma_values", "nbar_values", "model_variant"}, "grid");
        if (g.contains("gamma_values")) c.gamma_values = get_reals(g, "gamma_values");
        if (g.contains("nbar_values")) c.nbar_values = get_reals(g, "nbar_values");
        if (g.contains("model_variant")) c.model_variant = parse_variant(get_string(g, "model_variant"));
    }

    if (c.mode == RunMode::Evolve) {
        c.t_end = get_real(j, "t_end");
        c.dt = get_real(j, "dt");
        if (!(c.t_end > 0.0)) throw Error(ErrorKind::ConfigError, "t_end must be > 0", "t_end");
        if (!(c.dt > 0.0)) throw Error(ErrorKind::ConfigError, "dt must be > 0", "dt");
        if (j.contains("sample_every")) {
            const json& se = j["sample_every"];
            if (!se.is_number_integer() || se.get<long long>() <= 0)
                throw Error(ErrorKind::ConfigError, "sample_every must be a positive integer", "sample_every");
            c.sample_every = se.get<std::size_t>();
        }
    }

    c.output_path = get_string(j, "output_path", std::string{});
    const std::string fmt = get_string(j, "output_format", std::string{"csv"});
    if (fmt == "csv") c.output_format = io::Format::Csv;
    else if (fmt == "json") c.output_format = io::Format::Json;
    else throw Error(ErrorKind::ConfigError, "output_format must be 'csv' or 'json'", "output_format");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'", "config");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigError, std::string("invalid JSON: ") + e.what(), "config");
    }
    return parse_config(j);
}

inline io::Table run_steady(const RunConfig& c) {
    const ValidatedParams vp = validate(c.params);
    const auto couplings = effective_couplings(vp, c.drive);
    const Mat6 m = drift_rwa(DriftModel::rwa(vp, couplings));
    const auto st = stability<6>(m);
    const DiffusionMatrix d = diffusion(vp);
    const CovarianceMatrix sigma = steady_state(m, d);
    const auto meas = compute_measures(sigma);
    std::optional<double> occupation;
    if (couplings.r2.defined()) occupation = bogoliubov_occupation(sigma, *couplings.r2.value);

    io::Table t;
    t.columns = {"e_n", "g_a", "g_b", "stable", "max_real_part", "lyapunov_residual", "bogoliubov_occupation"};
    t.add_row({meas.e_n, meas.g_a, meas.g_b, st.stable, st.max_real_part, lyapunov_residual(m, sigma.matrix(), d),
               io::optional_cell(occupation)});
    return t;
}

inline io::Table run_evolve(const RunConfig& c) {
    const ValidatedParams vp = validate(c.params);
    const auto couplings = effective_couplings(vp, c.drive);
    const DriftModel model = c.model_variant == DriftVariant::Asymptotic ? DriftModel::asymptotic(vp, couplings)
                                                                         : DriftModel::rwa(vp, couplings);
    EvolveOptions opts;
    opts.sample_every = c.sample_every;
    const auto traj = evolve_covariance(model, diffusion(vp), default_initial_state(vp->nbar_b), c.t_end, c.dt, opts);

    io::Table t;
    t.columns = {"t", "e_n", "g_a", "g_b", "min_symplectic_eig", "mech_min_rotated_var"};
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto meas = compute_measures(traj.samples[k]);
        const auto var = quadrature_variances(traj.samples[k], Mode::Phonon);
        t.add_row({traj.times[k], meas.e_n, meas.g_a, meas.g_b, traj.min_symplectic_eig[k], var.min_rotated_var});
    }
    return t;
}

inline io::Table run_sweep_mode(const RunConfig& c, unsigned threads) {
    const ValidatedParams vp = validate(c.params);
    SweepGrid grid = default_reference_grid(c.params, effective_couplings(vp, c.drive), c.model_variant);
    if (c.gamma_values) grid.gamma_values = *c.gamma_values;
    if (c.nbar_values) grid.nbar_values = *c.nbar_values;
    const auto results = run_sweep(grid, threads);

    io::Table t;
    t.columns = {"gamma", "nbar", "peak_e_n", "peak_g_a", "peak_g_b", "stable", "regime", "error"};
    for (const auto& r : results) {
        io::Cell regime = std::monostate{};
        if (r.regime) regime = std::string(to_string(*r.regime));
        io::Cell error = std::monostate{};
        if (!r.error.empty()) error = r.error;
        t.add_row({r.gamma, r.nbar, io::optional_cell(r.peak_e_n), io::optional_cell(r.peak_g_a),
                   io::optional_cell(r.peak_g_b), r.stable, regime, error});
    }
    return t;
}

inline io::Table run_couplings(const RunConfig& c) {
    const ValidatedParams vp = validate(c.params);
    const auto k = effective_couplings(vp, c.drive);
    std::string reason;
    for (const DerivedValue* v : {&k.r1, &k.r2}) {
        if (v->defined()) continue;
        if (!reason.empty()) reason += "; ";
        reason += "requires " + v->condition;
    }
    io::Table t;
    t.columns = {"g1_re", "g1_im", "g2_re", "g2_im", "r1", "r2", "gt1", "gt2", "reason"};
    t.add_row({k.g1.real(), k.g1.imag(), k.g2.real(), k.g2.imag(), io::optional_cell(k.r1.value),
               io::optional_cell(k.r2.value), io::optional_cell(k.gt1.value), io::optional_cell(k.gt2.value),
               reason.empty() ? io::Cell{std::monostate{}} : io::Cell{reason}});
    return t;
}

/// Runs one configuration and returns its result table. Throws Error on failure.
inline io::Table execute(const RunConfig& c, unsigned threads = 1) {
    switch (c.mode) {
        case RunMode::Steady: return run_steady(c);
        case RunMode::Evolve: return run_evolve(c);
        case RunMode::Sweep: return run_sweep_mode(c, threads);
        case RunMode::Couplings: return run_couplings(c);
    }
    throw Error(ErrorKind::ConfigError, "unknown mode");
}

inline std::string error_record(const Error& e) {
    nlohmann::ordered_json j;
    j["status"] = "error";
    j["kind"] = std::string(to_string(e.kind()));
    j["field"] = e.field();
    j["message"] = e.what();
    j["exit_code"] = exit_code_for(e.kind());
    return j.dump();
}

/// Loads, executes and writes; returns the process exit code. Data goes to the
/// output file (or `out` when no path is set); the error record goes to `err`.
inline int run(const std::string& config_path, const std::optional<std::string>& output_override,
               const std::optional<std::string>& format_override, unsigned threads, std::ostream& out,
               std::ostream& err) {
    try {
        RunConfig c = load_config(config_path);
        if (output_override) c.output_path = *output_override;
        if (format_override) {
            if (*format_override == "csv") c.output_format = io::Format::Csv;
            else if (*format_override == "json") c.output_format = io::Format::Json;
            else throw Error(ErrorKind::ConfigError, "--format must be csv or json", "format");
        }
        const io::Table table = execute(c, threads);
        if (c.output_path.empty()) {
            io::write_table(out, table, c.output_format);
        } else {
            std::ofstream f(c.output_path, std::ios::binary);
            if (!f) throw Error(ErrorKind::ConfigError, "cannot write '" + c.output_path + "'", "output_path");
            io::write_table(f, table, c.output_format);
        }
        return kSuccess;
    } catch (const Error& e) {
        err << error_record(e) << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << error_record(Error(ErrorKind::Internal, e.what())) << '\n';
        return kNumericalFailure;
    }
}

}  // namespace magnomech::cli
