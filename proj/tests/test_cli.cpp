#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tunnelwave/config.hpp"
#include "tunnelwave/csvio.hpp"
#include "tunnelwave/errors.hpp"

using namespace tw;
namespace fs = std::filesystem;

namespace {

// Scratch area shared by all cases in this binary.
const std::string& test_dir() {
    static const std::string dir = [] {
        std::string tmpl = (fs::temp_directory_path() / "tw_cli_XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        REQUIRE(mkdtemp(buf.data()) != nullptr);
        return std::string(buf.data());
    }();
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_text(const std::string& name, const std::string& content) {
    const std::string path = test_dir() + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

struct CliRun {
    int code = -1;
    std::string out, err;
};

CliRun run_cli(const std::string& args) {
    const char* exe = std::getenv("TW_CLI_PATH");
    REQUIRE_MESSAGE(exe != nullptr, "TW_CLI_PATH must point at the driver binary");
    static int seq = 0;
    const std::string base = test_dir() + "/cli" + std::to_string(seq++);
    const std::string cmd =
        std::string(exe) + " " + args + " > " + base + ".out 2> " + base + ".err";
    const int rc = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(base + ".out");
    r.err = slurp(base + ".err");
    return r;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), (path + " missing"));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

// Config with canonical defaults and an absolute output directory.
std::string base_config(const std::string& name, const std::string& extra = "") {
    const std::string out = test_dir() + "/" + name + "_out";
    std::string body = "{\n  \"output_dir\": \"" + out + "\"";
    if (!extra.empty()) body += ",\n  " + extra;
    body += "\n}\n";
    return write_text(name + ".json", body);
}

} // namespace

TEST_CASE("seventeen-digit formatting round-trips doubles") {
    const double values[] = {3.141592653589793,  1.0 / 3.0, 6.02214076e23, -2.5e-308,
                             0.8598548059464040, -0.0,      1.0};
    for (double v : values) {
        const std::string s = format_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("wavefield binaries round-trip exactly") {
    WaveField f = WaveField::zeros(GridSpec{-3.25, 0.01, 257}, 1.75, 1.0 / 24, "roundtrip");
    for (int i = 0; i < f.n; ++i)
        f.values[static_cast<size_t>(i)] = {std::sin(0.1 * i) * 1e-30, std::cos(0.2 * i) * 1e4};
    const std::string path = test_dir() + "/field.bin";
    write_wavefield_binary(path, f);
    const WaveField g = read_wavefield_binary(path);
    CHECK(g.n == f.n);
    CHECK(g.x_min == f.x_min);
    CHECK(g.dx == f.dx);
    CHECK(g.t == f.t);
    CHECK(g.hbar == f.hbar);
    CHECK(g.meta == f.meta);
    bool identical = true;
    for (int i = 0; i < f.n; ++i)
        identical = identical && g.values[static_cast<size_t>(i)] == f.values[static_cast<size_t>(i)];
    CHECK(identical);

    // Truncated payloads must be rejected, not misread.
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    std::ofstream cut(test_dir() + "/cut.bin", std::ios::binary);
    cut.write(bytes.data(), static_cast<long>(bytes.size() - 16));
    cut.close();
    CHECK_THROWS_AS(read_wavefield_binary(test_dir() + "/cut.bin"), ConfigError);
}

TEST_CASE("csv writer rejects ragged rows") {
    const std::string path = test_dir() + "/ragged.csv";
    CHECK_THROWS_AS(write_csv(path, {"a", "b"}, {{1.0, 2.0, 3.0}}), ConfigError);
    write_csv(path, {"a", "b"}, {{0.1, 0.2}, {0.3, 1.0 / 3.0}});
    const auto rows = read_csv(path);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"a", "b"});
    CHECK(std::strtod(rows[2][1].c_str(), nullptr) == 1.0 / 3.0);
}

TEST_CASE("config hashing matches the published test vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("worker count reads the environment strictly") {
    unsetenv("TUNNELWAVE_WORKERS");
    CHECK(worker_count() == 1);
    setenv("TUNNELWAVE_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    setenv("TUNNELWAVE_WORKERS", "0", 1);
    CHECK_THROWS_AS(worker_count(), ConfigError);
    setenv("TUNNELWAVE_WORKERS", "many", 1);
    CHECK_THROWS_AS(worker_count(), ConfigError);
    unsetenv("TUNNELWAVE_WORKERS");
}

TEST_CASE("configs load with defaults and reject unknown keys") {
    const std::string path = write_text("minimal.json", "{}\n");
    const ExperimentConfig cfg = load_config(path);
    CHECK(cfg.window.e1 == 0.7);
    CHECK(cfg.window.e2 == 0.9);
    CHECK(cfg.potential.kind == PotentialKind::eckart);
    CHECK(cfg.density.e0 == 0.78);
    CHECK(cfg.output_dir == "out");
    CHECK(fnv1a64(cfg.raw_text) == fnv1a64("{}\n"));

    CHECK_THROWS_AS(load_config(write_text("junk.json", "{\"junk\": 1}")), ConfigError);
    CHECK_THROWS_AS(load_config(write_text("badwin.json",
                                           "{\"window\": {\"e1\": 0.9, \"e2\": 0.7}}")),
                    ConfigError);
    CHECK_THROWS_AS(load_config(write_text("badpot.json",
                                           "{\"potential\": {\"kind\": \"custom\"}}")),
                    ConfigError);
    CHECK_THROWS_AS(load_config(test_dir() + "/no_such.json"), ConfigError);

    const ExperimentConfig herm = load_config(write_text(
        "hermite.json",
        "{\"density\": {\"P\": {\"hermite\": {\"j\": 2, \"eta\": 1.25}}}}"));
    CHECK(herm.density.p_kind == PProfile::hermite);
    CHECK(herm.density.hermite_j == 2);

    const ExperimentConfig flat =
        load_config(write_text("flat.json", "{\"density\": {\"P\": \"const\"}}"));
    CHECK(flat.density.p_kind == PProfile::constant);
}

TEST_CASE("saddle diagnostics print the pinned constants") {
    const CliRun r = run_cli("estar -c " + base_config("estar"));
    CHECK(r.code == 0);
    CHECK(r.out.find("0.859854805946403") != std::string::npos);
    CHECK(r.out.find("0.41872246839345") != std::string::npos);
    CHECK(r.out.find("1.311376990759258") != std::string::npos);
}

TEST_CASE("action table covers the window at full precision") {
    const CliRun r = run_cli("actions -c " + base_config("actions"));
    CHECK(r.code == 0);
    const auto rows = read_csv(test_dir() + "/actions_out/actions.csv");
    REQUIRE(rows.size() >= 30);
    REQUIRE(rows[0].size() == 18);
    CHECK(rows[0][0] == "E");
    const double e_first = std::strtod(rows[1][0].c_str(), nullptr);
    const double e_last = std::strtod(rows.back()[0].c_str(), nullptr);
    CHECK(e_first >= 0.7);
    CHECK(e_last <= 0.9);
    for (size_t i = 1; i < rows.size(); ++i)
        for (const std::string& cell : rows[i])
            CHECK(std::isfinite(std::strtod(cell.c_str(), nullptr)));
}

TEST_CASE("transmission table matches the closed form") {
    const std::string cfg = base_config(
        "trans", "\"hbar_list\": [0.0625],\n  \"transmission\": {\"energies\": [0.8]}");
    const CliRun r = run_cli("transmission -c " + cfg);
    CHECK(r.code == 0);
    const auto rows = read_csv(test_dir() + "/trans_out/transmission.csv");
    REQUIRE(rows.size() == 2);
    const double t2 = std::strtod(rows[1][4].c_str(), nullptr);
    CHECK(t2 == doctest::Approx(3.1370578788702618609e-7).epsilon(1e-6));
}

TEST_CASE("trajectory output is monotone with the saddle speed") {
    const CliRun r = run_cli("trajectory -c " + base_config("traj"));
    CHECK(r.code == 0);
    const auto rows = read_csv(test_dir() + "/traj_out/trajectory.csv");
    REQUIRE(rows.size() > 50);
    double prev_q = -1e300;
    for (size_t i = 1; i < rows.size(); ++i) {
        const double q = std::strtod(rows[i][1].c_str(), nullptr);
        CHECK(q > prev_q);
        prev_q = q;
    }
    const double qdot_last = std::strtod(rows.back()[2].c_str(), nullptr);
    CHECK(std::abs(qdot_last - 1.3113769907592583466) < 1e-6);
}

TEST_CASE("validation gates bad windows with exit code one") {
    CHECK(run_cli("validate -c " + base_config("valgood")).code == 0);
    const CliRun bad = run_cli(
        "validate -c " +
        base_config("valbad", "\"window\": {\"e1\": 0.7, \"e2\": 1.2}"));
    CHECK(bad.code == 1);
}

TEST_CASE("evolution artifacts land in the output directory") {
    const std::string cfg = base_config(
        "evolve",
        "\"hbar_list\": [0.125],\n  \"evolution\": {\"L\": 60.0, \"n\": 4096, "
        "\"t_final\": 30.0, \"x_c\": -25.0, \"snapshot_times\": [15.0]}");
    const CliRun r = run_cli("evolve -c " + cfg);
    CHECK(r.code == 0);
    const std::string dir = test_dir() + "/evolve_out/evolve_h0.125";
    CHECK(fs::exists(dir + "/history.csv"));
    CHECK(fs::exists(dir + "/snapshot_000.csv"));
    CHECK(fs::exists(dir + "/snapshot_001.csv"));
    CHECK(fs::exists(dir + "/trace.json"));

    // Norm column stays within the unitarity guard.
    const auto hist = read_csv(dir + "/history.csv");
    REQUIRE(hist.size() > 100);
    const double n_first = std::strtod(hist[1][2].c_str(), nullptr);
    const double n_last = std::strtod(hist.back()[2].c_str(), nullptr);
    CHECK(std::abs(n_last / n_first - 1.0) < 1e-9);

    // The manifest pins the exact config bytes it was run from.
    const std::string manifest_text = slurp(test_dir() + "/evolve_out/manifest.json");
    REQUIRE(!manifest_text.empty());
    const auto manifest = nlohmann::json::parse(manifest_text);
    char expect[24];
    std::snprintf(expect, sizeof expect, "%016llx", fnv1a64(slurp(cfg)));
    CHECK(manifest["config_fnv1a64"].get<std::string>() == expect);
    CHECK(manifest["tool_version"].get<std::string>() == std::string(version_string()));
}

TEST_CASE("comparison pipeline verdicts and exit codes") {
    const std::string body =
        "\"hbar_list\": [0.0625],\n  \"evolution\": {\"L\": 100.0, \"n\": 16384, "
        "\"t_final\": 62.0, \"x_c\": -45.0, \"buffer_tol\": 0.05},\n  "
        "\"compare\": {\"gauged_tol\": %TOL%}";
    auto with_tol = [&](const std::string& name, const std::string& tol) {
        std::string b = body;
        b.replace(b.find("%TOL%"), 5, tol);
        return base_config(name, b);
    };

    const CliRun ok = run_cli("compare -c " + with_tol("cmp_ok", "0.5"));
    CHECK(ok.code == 0);
    const auto report =
        nlohmann::json::parse(slurp(test_dir() + "/cmp_ok_out/compare_report.json"));
    REQUIRE(report["rows"].size() == 1);
    const auto& row = report["rows"][0];
    CHECK(row["pass"].get<bool>());
    CHECK(row["gauged_err"].get<double>() < 0.5);
    CHECK(row["gauged_err"].get<double>() > 1e-3);
    CHECK(row["mean_k"].get<double>() > 1.2);

    // Same physics against an unreachable tolerance: acceptance exit code.
    const CliRun fail = run_cli("compare -c " + with_tol("cmp_fail", "0.01"));
    CHECK(fail.code == 3);
}

TEST_CASE("bad input is a config error, not a crash") {
    CHECK(run_cli("estar -c " + test_dir() + "/missing.json").code == 1);
    CHECK(run_cli("estar -c " + write_text("broken.json", "{ not json")).code == 1);
    const CliRun junk = run_cli("estar -c " + write_text("unknown.json", "{\"junk\": 1}"));
    CHECK(junk.code == 1);
    CHECK(junk.err.find("config error") != std::string::npos);
    CHECK(run_cli("frobnicate").code != 0);
}

TEST_CASE("sweep subcommand reports individual criteria") {
    const std::string out = test_dir() + "/sweep_out";
    const CliRun r = run_cli("sweep -o " + out + " --only 1 --only 5");
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("all pass") != std::string::npos);
    CHECK(fs::exists(out + "/action_closed_form.csv"));
    CHECK(fs::exists(out + "/asymptotic_norm.csv"));
}
