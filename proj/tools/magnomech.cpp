// Command-line front end: magnomech run --config <path> [--output <path>] [--format csv|json] [--threads N]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "magnomech/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Linearized cavity-magnomechanics simulator: covariance dynamics, entanglement and steering"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Execute a JSON run configuration");
    std::string config_path;
    std::string output_path;
    std::string format;
    unsigned threads = 1;
    run->add_option("--config", config_path, "Path to the JSON run configuration")->required();
    run->add_option("--output", output_path, "Output file (overrides output_path in the config)");
    run->add_option("--format", format, "Output format (overrides output_format)")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--threads", threads, "Worker threads for sweeps; never changes the output")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : magnomech::cli::kConfigError;
    }

    const auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<std::string>(s); };
    return magnomech::cli::run(config_path, opt(output_path), opt(format), threads, std::cout, std::cerr);
}
