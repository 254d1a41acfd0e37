#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "magnomech/cli.hpp"

using namespace magnomech;
using Catch::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json ref_config(const std::string& mode) {
    return json{{"mode", mode},
                {"params",
                 {{"delta_a", 1000.0},
                  {"delta_m", 1000.0},
                  {"g", 0.28},
                  {"eta", 2e-8},
                  {"kappa_a", 0.02},
                  {"kappa_m", 0.3},
                  {"gamma", 0.02},
                  {"nbar_b", 0.0}}},
                {"drive", {{"mode", "couplings"}, {"g1", 0.21}, {"g2", 0.0}}}};
}

ErrorKind parse_error_kind(const json& j) {
    try {
        cli::parse_config(j);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("config was accepted");
    return ErrorKind::Internal;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("magnomech_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name, std::ios::binary) << text;
        return path / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Proc {
    int status;
    std::string out;
};

Proc run_cli(const std::string& args) {
    const std::string cmd = std::string(MAGNOMECH_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int st = ::pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string config_file(const std::string& name) { return std::string(MAGNOMECH_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("config parsing fills parameters and defaults", "[cli][config]") {
    const auto c = cli::parse_config(ref_config("steady"));
    CHECK(c.mode == cli::RunMode::Steady);
    CHECK(c.params == reference_params());
    CHECK(c.drive.mode == DriveMode::Couplings);
    CHECK(c.drive.g1 == Complex(0.21, 0.0));
    CHECK(c.output_format == io::Format::Csv);
    CHECK(c.output_path.empty());

    auto j = ref_config("sweep");
    j["grid"] = {{"gamma_values", {0.01, 0.02}}, {"nbar_values", {0.0}}, {"model_variant", "asymptotic"}};
    const auto s = cli::parse_config(j);
    CHECK(s.gamma_values == std::vector<double>{0.01, 0.02});
    CHECK(s.model_variant == DriftVariant::Asymptotic);

    auto a = ref_config("couplings");
    a["drive"] = {{"mode", "amplitudes"}, {"e1", 5.0}};
    const auto ac = cli::parse_config(a);
    CHECK(ac.drive.mode == DriveMode::Amplitudes);
    CHECK(ac.drive.e1 == 5.0);
    CHECK(ac.drive.e2 == 0.0);
}

TEST_CASE("config parsing rejects bad input", "[cli][config]") {
    auto j = ref_config("steady");
    j["bogus"] = 1;
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    j = ref_config("steady");
    j["params"]["kappa"] = 0.1;
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    j = ref_config("steady");
    j["params"].erase("g");
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    j = ref_config("steady");
    j["params"]["g"] = "0.28";
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    CHECK(parse_error_kind(ref_config("plot")) == ErrorKind::ConfigError);

    j = ref_config("evolve");
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);  // t_end and dt missing
    j["t_end"] = 10.0;
    j["dt"] = -0.1;
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);
    j["dt"] = 0.1;
    j["sample_every"] = 0;
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    j = ref_config("steady");
    j["drive"]["g1"] = -0.1;
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    j = ref_config("steady");
    j["output_format"] = "xml";
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    j = ref_config("sweep");
    j["grid"] = {{"model_variant", "full"}};
    CHECK(parse_error_kind(j) == ErrorKind::ConfigError);

    CHECK(parse_error_kind(json::array()) == ErrorKind::ConfigError);
}

TEST_CASE("exit code mapping", "[cli]") {
    CHECK(cli::exit_code_for(ErrorKind::ConfigError) == 2);
    CHECK(cli::exit_code_for(ErrorKind::NonPositiveRate) == 2);
    CHECK(cli::exit_code_for(ErrorKind::FrameMismatch) == 2);
    CHECK(cli::exit_code_for(ErrorKind::UnstableDrift) == 3);
    CHECK(cli::exit_code_for(ErrorKind::UnphysicalState) == 4);
    CHECK(cli::exit_code_for(ErrorKind::NonFinite) == 4);
    CHECK(cli::exit_code_for(ErrorKind::NotConverged) == 4);
}

TEST_CASE("steady mode at the reference parameters", "[cli][steady]") {
    const auto t = cli::execute(cli::parse_config(ref_config("steady")));
    REQUIRE(t.rows.size() == 1);
    REQUIRE(t.columns.size() == 7);
    CHECK(t.columns[0] == "e_n");
    const auto& row = t.rows[0];
    CHECK(std::get<double>(row[0]) > 0.0);
    CHECK(std::get<double>(row[0]) == Approx(1.21908524120449).epsilon(1e-9));
    CHECK(std::get<bool>(row[3]));
    CHECK(std::get<double>(row[5]) < 1e-10);
    CHECK(std::get<double>(row[6]) == Approx(0.130860933758979).epsilon(1e-9));
}

TEST_CASE("evolve mode without couplings stays separable", "[cli][evolve]") {
    auto j = ref_config("evolve");
    j["drive"] = {{"mode", "couplings"}, {"g1", 0.0}, {"g2", 0.0}};
    j["params"]["g"] = 0.0;
    j["t_end"] = 20.0;
    j["dt"] = 0.05;
    j["sample_every"] = 10;
    const auto t = cli::execute(cli::parse_config(j));
    REQUIRE(t.columns == std::vector<std::string>{"t", "e_n", "g_a", "g_b", "min_symplectic_eig",
                                                  "mech_min_rotated_var"});
    REQUIRE(t.rows.size() == 41);
    for (const auto& row : t.rows) {
        CHECK(std::get<double>(row[1]) == 0.0);
        CHECK(std::get<double>(row[2]) == 0.0);
        CHECK(std::get<double>(row[3]) == 0.0);
        CHECK(std::get<double>(row[4]) >= 0.5 - 1e-9);
    }
    CHECK(std::get<double>(t.rows.back()[0]) == Approx(20.0));
}

TEST_CASE("sweep mode writes one row per grid point", "[cli][sweep]") {
    auto j = ref_config("sweep");
    j["grid"] = {{"gamma_values", {0.005, 0.02}}, {"nbar_values", {0.0, 1.0}}};
    const auto t = cli::execute(cli::parse_config(j), 2);
    REQUIRE(t.rows.size() == 4);
    const std::string csv = io::to_string(t, io::Format::Csv);
    const auto fields = io::read_csv_fields(csv);
    REQUIRE(fields.size() == 5);
    CHECK(fields[0] == std::vector<std::string>{"gamma", "nbar", "peak_e_n", "peak_g_a", "peak_g_b", "stable",
                                                "regime", "error"});
    CHECK(fields[1][0] == "0.0050000000000000001");
    CHECK(fields[1][1] == "0");
    CHECK(fields[2][1] == "1");
    CHECK(fields[3][0] == "0.02");
    // gamma = 0.005 is unstable: peaks omitted
    CHECK(fields[1][5] == "false");
    CHECK(fields[1][2].empty());
    CHECK(fields[1][6].empty());
    CHECK(fields[3][5] == "true");
    CHECK(fields[3][6] == "two_way");
}

TEST_CASE("couplings mode", "[cli][couplings]") {
    const auto t = cli::execute(cli::parse_config(ref_config("couplings")));
    REQUIRE(t.rows.size() == 1);
    const auto& row = t.rows[0];
    CHECK(std::get<double>(row[0]) == 0.21);
    CHECK(std::holds_alternative<std::monostate>(row[4]));  // r1 undefined without a red tone
    CHECK(std::get<double>(row[5]) == Approx(0.97295507452765665).epsilon(1e-12));
    CHECK(std::holds_alternative<std::monostate>(row[6]));
    CHECK(std::get<double>(row[7]) == Approx(0.18520259177452134).epsilon(1e-12));
    CHECK(std::get<std::string>(row[8]) == "requires |G1| < |G2|");

    auto j = ref_config("couplings");
    j["drive"] = {{"mode", "couplings"}, {"g1", 0.3}};
    const auto both = cli::execute(cli::parse_config(j));
    CHECK(std::get<std::string>(both.rows[0][8]) == "requires |G1| < |G2|; requires |G1| < g");
}

TEST_CASE("CSV round trip keeps every bit", "[cli][io][property]") {
    auto j = ref_config("sweep");
    j["grid"] = {{"gamma_values", {0.015, 0.02, 0.033, 0.07}}, {"nbar_values", {0.0, 0.25, 1.5}}};
    const auto t = cli::execute(cli::parse_config(j));
    const auto fields = io::read_csv_fields(io::to_string(t, io::Format::Csv));
    REQUIRE(fields.size() == t.rows.size() + 1);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            if (const auto* v = std::get_if<double>(&t.rows[r][c])) CHECK(io::parse_real(fields[r + 1][c]) == *v);

    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23, 0.0}) CHECK(io::parse_real(io::format_real(v)) == v);
    CHECK_THROWS_AS(io::parse_real("1.5x"), Error);
}

TEST_CASE("CSV escaping", "[cli][io]") {
    io::Table t;
    t.columns = {"a", "b"};
    t.add_row({std::string("x,y"), std::string("say \"hi\"")});
    const std::string csv = io::to_string(t, io::Format::Csv);
    CHECK(csv == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
    const auto back = io::read_csv_fields(csv);
    CHECK(back[1][0] == "x,y");
    CHECK(back[1][1] == "say \"hi\"");
    CHECK_THROWS_AS(t.add_row({1.0}), Error);
}

TEST_CASE("JSON output", "[cli][io]") {
    const auto t = cli::execute(cli::parse_config(ref_config("couplings")));
    const auto j = json::parse(io::to_string(t, io::Format::Json));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    CHECK(j[0]["g1_re"].get<double>() == 0.21);
    CHECK(j[0]["r1"].is_null());
    CHECK(j[0]["r2"].get<double>() == Approx(0.97295507452765665));
}

TEST_CASE("binary: steady run writes CSV to stdout", "[cli][binary]") {
    const auto p = run_cli("run --config " + config_file("reference_steady.json"));
    CHECK(p.status == 0);
    const auto fields = io::read_csv_fields(p.out);
    REQUIRE(fields.size() == 2);
    CHECK(fields[0][0] == "e_n");
    CHECK(io::parse_real(fields[1][0]) > 0.0);
}

TEST_CASE("binary: output is byte-identical across runs and thread counts", "[cli][binary][property]") {
    TempDir dir;
    auto j = ref_config("sweep");
    j["grid"] = {{"gamma_values", {0.01, 0.02, 0.05}}, {"nbar_values", {0.0, 0.5, 3.0}}};
    const auto cfg = dir.write("sweep.json", j.dump());
    const auto a = dir.path / "a.csv";
    const auto b = dir.path / "b.csv";
    const auto c = dir.path / "c.json";
    REQUIRE(run_cli("run --config " + cfg.string() + " --output " + a.string() + " --threads 1").status == 0);
    REQUIRE(run_cli("run --config " + cfg.string() + " --output " + b.string() + " --threads 4").status == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(io::read_csv_fields(slurp(a)).size() == 10);
    REQUIRE(run_cli("run --config " + cfg.string() + " --output " + c.string() + " --format json").status == 0);
    CHECK(json::parse(slurp(c)).size() == 9);
}

TEST_CASE("binary: exit codes", "[cli][binary][errors]") {
    TempDir dir;
    CHECK(run_cli("run --config " + (dir.path / "missing.json").string()).status == 2);
    CHECK(run_cli("run --config " + dir.write("bad.json", "{ not json").string()).status == 2);
    CHECK(run_cli("frobnicate").status == 2);
    CHECK(run_cli("run").status == 2);
    CHECK(run_cli("run --config " + config_file("reference_steady.json") + " --threads 0").status == 2);

    auto neg = ref_config("steady");
    neg["params"]["gamma"] = -0.01;
    CHECK(run_cli("run --config " + dir.write("neg.json", neg.dump()).string()).status == 2);

    auto unstable = ref_config("steady");
    unstable["params"]["gamma"] = 0.005;
    const auto u = run_cli("run --config " + dir.write("unstable.json", unstable.dump()).string());
    CHECK(u.status == 3);
    CHECK(u.out.empty());
}

TEST_CASE("error record is one JSON line", "[cli][errors]") {
    TempDir dir;
    auto bad = ref_config("steady");
    bad["params"]["kappa_m"] = 0.0;
    const auto cfg = dir.write("bad.json", bad.dump());
    std::ostringstream out, err;
    const int code = cli::run(cfg.string(), std::nullopt, std::nullopt, 1, out, err);
    CHECK(code == 2);
    CHECK(out.str().empty());
    const std::string line = err.str();
    REQUIRE(!line.empty());
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);
    const auto rec = json::parse(line);
    CHECK(rec["status"] == "error");
    CHECK(rec["kind"] == "NonPositiveRate");
    CHECK(rec["field"] == "kappa_m");
    CHECK(rec["exit_code"] == 2);
}

TEST_CASE("shipped configs run", "[cli][binary]") {
    for (const char* name : {"reference_steady.json", "two_tone_steady.json", "reference_couplings.json", "reference_evolve.json",
                             "reference_sweep.json"}) {
        INFO(name);
        std::ostringstream out, err;
        CHECK(cli::run(config_file(name), std::nullopt, std::nullopt, 1, out, err) == 0);
        CHECK(err.str().empty());
        CHECK(!out.str().empty());
    }
    std::ostringstream out, err;
    REQUIRE(cli::run(config_file("reference_couplings.json"), std::nullopt, std::string("json"), 1, out, err) == 0);
    const auto j = json::parse(out.str());
    CHECK(std::abs(std::complex<double>(j[0]["g1_re"].get<double>(), j[0]["g1_im"].get<double>())) ==
          Approx(0.21).epsilon(1e-12));
}
