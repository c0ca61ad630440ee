#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vmcyl/config.hpp"
#include "vmcyl/runner.hpp"

using namespace vmcyl;
namespace fs = std::filesystem;

namespace {

const char* base_config = R"(# two-species test run
run.R0 = 1.0
run.R = 0.7
run.grid_n = 65
run.seed = 42
run.threads = 2
run.out_dir = OUTDIR

species.0.name = electrons
species.0.mass = 1.0
species.0.charge = -1.0
species.0.ansatz.kind = product
species.0.ansatz.amplitude = 0.1
species.0.ansatz.exponent = 4
species.0.ansatz.energy_cutoff = 1.6
species.0.ansatz.f_lo = -0.7
species.0.ansatz.f_hi = 0.2
species.0.ansatz.g_lo = -0.6
species.0.ansatz.g_hi = 0.4

species.1.name = ions
species.1.mass = 1.0
species.1.charge = 1.0
species.1.ansatz.kind = product
species.1.ansatz.amplitude = 0.07
species.1.ansatz.energy_cutoff = 1.5
species.1.ansatz.f_lo = -0.2
species.1.ansatz.f_hi = 0.6
species.1.ansatz.g_lo = -0.45
species.1.ansatz.g_hi = 0.5

verify.samples = 10
verify.horizon = 5
)";

std::string write_config(const fs::path& dir, const std::string& text)
{
    fs::create_directories(dir);
    const fs::path p = dir / "run.cfg";
    std::ofstream f(p);
    f << text;
    return p.string();
}

std::string with_outdir(const fs::path& dir)
{
    std::string text = base_config;
    const std::string key = "OUTDIR";
    text.replace(text.find(key), key.size(), (dir / "out").string());
    return text;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(VMCYL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("config parsing errors carry line numbers")
{
    CHECK_THROWS_WITH_AS(RunConfig::parse_text("run.R0 = abc\n", "cfg"),
                         doctest::Contains("cfg:1"), ConfigError);
    CHECK_THROWS_WITH_AS(RunConfig::parse_text("just words\n", "cfg"),
                         doctest::Contains("cfg:1"), ConfigError);
    CHECK_THROWS_WITH_AS(RunConfig::parse_text("run.R0 = 1\nrun.R0 = 2\n", "cfg"),
                         doctest::Contains("cfg:2"), ConfigError);
    // an empty species list is rejected
    CHECK_THROWS_AS(RunConfig::parse_text("run.R0 = 1\n", "cfg"), ConfigError);
    // unknown keys are rejected with their line
    std::string text = base_config;
    text.replace(text.find("OUTDIR"), 6, "/tmp/x");
    CHECK_THROWS_WITH_AS(RunConfig::parse_text(text + "run.bogus = 1\n", "cfg"),
                         doctest::Contains("run.bogus"), ConfigError);
}

TEST_CASE("canonical serialization round-trips")
{
    std::string text = with_outdir("/tmp/vmcyl_cli_rt");
    const RunConfig a = RunConfig::parse_text(text);
    const std::string canon = a.canonical_text();
    const RunConfig b = RunConfig::parse_text(canon);
    CHECK(b.canonical_text() == canon);
    CHECK(sha256_hex(b.canonical_text()) == sha256_hex(canon));
}

TEST_CASE("sha256 reference vector")
{
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("solve mode writes artifacts and is bit-reproducible")
{
    const fs::path dir = "/tmp/vmcyl_cli_solve";
    fs::remove_all(dir);
    const std::string cfg = write_config(dir, with_outdir(dir));
    REQUIRE(run_cli("--config " + cfg + " --mode solve") == 0);
    REQUIRE(fs::exists(dir / "out" / "profiles.csv"));
    REQUIRE(fs::exists(dir / "out" / "solve_report.json"));
    const std::string first = slurp(dir / "out" / "profiles.csv");
    CHECK(first.find("# config_hash=") == 0);
    CHECK(first.find("r,phi,Aphi,A3,rho,jphi,j3,Er,Bphi,B3,xi,zeta") != std::string::npos);

    // rerun from the resolved config: outputs must match byte for byte
    const fs::path dir2 = "/tmp/vmcyl_cli_solve2";
    fs::remove_all(dir2);
    fs::create_directories(dir2);
    REQUIRE(run_cli("--config " + (dir / "out" / "config_resolved.cfg").string() +
                    " --mode solve --out " + (dir2 / "out").string()) == 0);
    const std::string second = slurp(dir2 / "out" / "profiles.csv");
    CHECK(second == first);
}

TEST_CASE("zero-amplitude solve yields zero profiles and exit 0")
{
    const fs::path dir = "/tmp/vmcyl_cli_zero";
    fs::remove_all(dir);
    std::string text = with_outdir(dir);
    const std::string from = "species.0.ansatz.amplitude = 0.1";
    text.replace(text.find(from), from.size(), "species.0.ansatz.amplitude = 0.0");
    const std::string from2 = "species.1.ansatz.amplitude = 0.07";
    text.replace(text.find(from2), from2.size(), "species.1.ansatz.amplitude = 0.0");
    const std::string cfg = write_config(dir, text);
    REQUIRE(run_cli("--config " + cfg) == 0);
    std::ifstream csv(dir / "out" / "profiles.csv");
    std::string line;
    std::getline(csv, line); // hash
    std::getline(csv, line); // header
    while (std::getline(csv, line)) {
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ','); // r
        for (int c = 0; c < 9; ++c) {
            std::getline(ls, cell, ',');
            if (c < 9 - 2) // xi, zeta columns are zero here too, but keep it strict
                CHECK(std::stod(cell) == 0.0);
        }
    }
}

TEST_CASE("config errors exit with status 2")
{
    const fs::path dir = "/tmp/vmcyl_cli_err";
    fs::remove_all(dir);
    const std::string cfg = write_config(dir, "species.0.mass = 1\nnot a config\n");
    CHECK(run_cli("--config " + cfg) == 2);
    CHECK(run_cli("--config /nonexistent/file.cfg") == 2);
    // empty species list
    const std::string cfg2 = write_config(dir / "b", "run.R0 = 1.0\n");
    CHECK(run_cli("--config " + cfg2) == 2);
}

TEST_CASE("confine mode thresholds and sweep flip")
{
    const fs::path dir = "/tmp/vmcyl_cli_confine";
    fs::remove_all(dir);
    std::string text = with_outdir(dir);
    // theta-a windows: negative species end at 0, positive start at 0
    auto repl = [&](const std::string& from, const std::string& to) {
        REQUIRE(text.find(from) != std::string::npos);
        text.replace(text.find(from), from.size(), to);
    };
    repl("species.0.ansatz.f_lo = -0.7", "species.0.ansatz.f_lo = -0.8");
    repl("species.0.ansatz.f_hi = 0.2", "species.0.ansatz.f_hi = 0.0");
    repl("species.1.ansatz.f_lo = -0.2", "species.1.ansatz.f_lo = 0.0");
    repl("species.1.ansatz.f_hi = 0.6", "species.1.ansatz.f_hi = 0.8");
    text += "confine.mode = theta-a\n";

    // without an external field the verdict fails (exit 1)
    const std::string cfg = write_config(dir, text);
    CHECK(run_cli("--config " + cfg + " --mode confine") == 1);

    // sweep: the verdict flips from fail to pass within one step of the
    // threshold slope
    REQUIRE(run_cli("--config " + cfg + " --mode sweep") == 0);
    std::ifstream csv(dir / "out" / "sweep.csv");
    std::string line;
    std::getline(csv, line); // hash
    std::getline(csv, line); // header
    double last_fail = -1.0, first_pass = -1.0;
    while (std::getline(csv, line)) {
        std::istringstream ls(line);
        std::string scale, coeff, verdict;
        std::getline(ls, scale, ',');
        std::getline(ls, coeff, ',');
        std::getline(ls, verdict, ',');
        if (verdict == "fail")
            last_fail = std::stod(scale);
        else if (first_pass < 0.0)
            first_pass = std::stod(scale);
    }
    REQUIRE(first_pass >= 0.0);
    REQUIRE(last_fail >= 0.0);
    CHECK(last_fail < 1.0);
    CHECK(first_pass >= 1.0 - 1e-12);
    CHECK(first_pass - last_fail == doctest::Approx(2.0 / 20.0).epsilon(1e-9));
}

TEST_CASE("extend mode reports tails for a confined configuration")
{
    const fs::path dir = "/tmp/vmcyl_cli_extend";
    fs::remove_all(dir);
    std::string text = with_outdir(dir);
    // charge- and current-balanced pair: equal masses, opposite charges,
    // identical symmetric windows; the solution is identically zero and the
    // moments vanish
    auto repl = [&](const std::string& from, const std::string& to) {
        REQUIRE(text.find(from) != std::string::npos);
        text.replace(text.find(from), from.size(), to);
    };
    repl("species.1.ansatz.amplitude = 0.07", "species.1.ansatz.amplitude = 0.1");
    repl("species.1.ansatz.energy_cutoff = 1.5", "species.1.ansatz.energy_cutoff = 1.6");
    repl("species.0.ansatz.f_lo = -0.7", "species.0.ansatz.f_lo = -0.5");
    repl("species.0.ansatz.f_hi = 0.2", "species.0.ansatz.f_hi = 0.5");
    repl("species.1.ansatz.f_lo = -0.2", "species.1.ansatz.f_lo = -0.5");
    repl("species.1.ansatz.f_hi = 0.6", "species.1.ansatz.f_hi = 0.5");
    repl("species.0.ansatz.g_lo = -0.6", "species.0.ansatz.g_lo = -0.5");
    repl("species.0.ansatz.g_hi = 0.4", "species.0.ansatz.g_hi = 0.5");
    repl("species.1.ansatz.g_lo = -0.45", "species.1.ansatz.g_lo = -0.5");
    repl("species.1.ansatz.g_hi = 0.5", "species.1.ansatz.g_hi = 0.5");
    const std::string cfg = write_config(dir, text);
    REQUIRE(run_cli("--config " + cfg + " --mode extend") == 0);
    const std::string report = slurp(dir / "out" / "extend.json");
    CHECK(report.find("\"charge_moment\": 0.0") != std::string::npos);
}
