#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qchaos/config.hpp"
#include "qchaos/csvio.hpp"
#include "qchaos/runner.hpp"

using namespace qchaos;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qchaos_runner_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json manifest_of(const fs::path& run_dir) { return json::parse(slurp(run_dir / "manifest.json")); }

std::size_t line_count(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++n;
    return n;
}

RunConfig small_twa_config(const fs::path& out) {
    RunConfig c;
    c.mode = RunMode::twa;
    c.n_trajectories = 5;
    c.t_final = 26.0;  // slightly over two drive periods
    c.sample_interval = 6.5;
    c.dt = 0.065;
    c.seed = 4242;
    c.output_dir = out.string();
    return c;
}

// Resolves the CLI under test: the ctest environment exports QCHAOS_CLI_BIN;
// direct invocations fall back to the sibling binary next to this executable.
std::string cli_binary() {
    if (const char* env = std::getenv("QCHAOS_CLI_BIN")) return env;
    std::error_code ec;
    const fs::path self = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        const fs::path sibling = self.parent_path() / "qchaos";
        if (fs::exists(sibling)) return sibling.string();
    }
    REQUIRE_MESSAGE(false, "qchaos CLI binary not found; set QCHAOS_CLI_BIN");
    return {};
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    const std::string bin = cli_binary();
    const fs::path capture = fs::temp_directory_path() / "qchaos_runner_tests" / "cli_capture.txt";
    fs::create_directories(capture.parent_path());
    const std::string cmd =
        std::string("\"") + bin + "\" " + args + " >" + capture.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) *output = slurp(capture);
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("mean-field run writes snapshots, sections and a manifest") {
    const fs::path dir = fresh_dir("twa");
    const RunConfig c = small_twa_config(dir);
    const RunArtifacts art = run(c);

    CHECK(fs::exists(dir / "config.json"));
    CHECK(fs::exists(dir / "twa_snapshots.csv"));
    CHECK(fs::exists(dir / "stroboscopic.csv"));
    CHECK(line_count(dir / "twa_snapshots.csv") == 1 + 5 * 5);  // header + times x members
    CHECK(line_count(dir / "stroboscopic.csv") == 1 + 2 * 5);   // header + periods x members

    const json m = manifest_of(dir);
    CHECK(m.at("status") == "ok");
    CHECK(m.at("version") == std::string(kVersion));
    CHECK(m.at("mode") == "twa");
    CHECK(m.at("seed") == 4242);
    CHECK(m.at("config_hash").get<std::string>().size() == 16);
    CHECK(m.at("timing").contains("wall_time_s"));
    for (const char* name : {"config.json", "twa_snapshots.csv", "stroboscopic.csv"}) {
        bool found = false;
        for (const auto& o : m.at("outputs")) found = found || (o == name);
        CHECK(found);
    }
    CHECK(art.manifest_path == (dir / "manifest.json").string());

    // The saved config must load back to the exact run configuration.
    CHECK(load_config((dir / "config.json").string()) == c);
}

TEST_CASE("re-running the same config reproduces the manifest except timing") {
    const fs::path dir = fresh_dir("repeat");
    const RunConfig c = small_twa_config(dir);
    run(c);
    json first = manifest_of(dir);
    run(c);
    json second = manifest_of(dir);
    CHECK(first != second);  // timestamps move
    first.erase("timing");
    second.erase("timing");
    CHECK(first == second);
}

TEST_CASE("closed-system trajectory run: purity pinned at 1, no entanglement at t = 0") {
    const fs::path dir = fresh_dir("pure");
    RunConfig c;
    c.mode = RunMode::trajectories;
    c.params.kappa = 0.0;
    c.n_trajectories = 1;
    c.t_final = 1.0;
    c.dt = 1e-3;
    c.sample_interval = 0.5;
    c.fock_n_max = 100;
    c.analysis_times = {0.0, 0.5, 1.0};
    c.output_dir = dir.string();
    run(c);

    const auto rows = csvio::read_observables_csv((dir / "observables.csv").string());
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
        CHECK(std::abs(row.purity - 1.0) <= 1e-6);
        CHECK(!std::isnan(row.E_N));
        CHECK(!std::isnan(row.N_minus));
    }
    CHECK(std::abs(rows[0].E_N) <= 1e-10);  // product initial state
    CHECK(rows[2].E_N < 1e-10);             // never positive by convention

    // A single closed trajectory has identical selective/nonselective widths.
    for (const auto& row : rows) CHECK(row.Delta_xp == doctest::Approx(row.delta_xp).epsilon(1e-12));

    CHECK(fs::exists(dir / "jumps.csv"));
    CHECK(line_count(dir / "jumps.csv") == 1);  // header only: kappa = 0 means no clicks
    CHECK(fs::exists(dir / "final_state_traj0.qsnap"));
    const SpinorState final_state =
        csvio::read_spinor_snapshot((dir / "final_state_traj0.qsnap").string());
    CHECK(final_state.t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(final_state.norm2() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("failed runs leave an error manifest behind") {
    const fs::path dir = fresh_dir("broken");
    RunConfig c;
    c.mode = RunMode::trajectories;
    c.n_trajectories = 1;
    c.t_final = 1.0;
    c.dt = 1e-3;
    c.sample_interval = 0.5;
    c.grid = GridSpec{64, -4.0, 4.0};  // packet does not fit: must abort
    c.output_dir = dir.string();
    CHECK_THROWS(run(c));
    const json m = manifest_of(dir);
    CHECK(m.at("status") == "error");
    CHECK(!m.at("error").get<std::string>().empty());
}

TEST_CASE("command-line interface") {
    const fs::path base = fresh_dir("cli");

    SUBCASE("twa subcommand with a config file") {
        const fs::path out = base / "run1";
        RunConfig c = small_twa_config(out);
        c.output_dir.clear();
        const fs::path cfg = base / "cfg.json";
        save_config(cfg.string(), c);

        const int rc = run_cli("twa --config " + cfg.string() + " --out " + out.string());
        CHECK(rc == 0);
        CHECK(manifest_of(out).at("status") == "ok");
    }
    SUBCASE("seed and trajectory-count overrides reach the manifest") {
        const fs::path out = base / "run2";
        RunConfig c = small_twa_config(out);
        c.output_dir.clear();
        const fs::path cfg = base / "cfg2.json";
        save_config(cfg.string(), c);

        const int rc = run_cli("twa --config " + cfg.string() + " --out " + out.string() +
                               " --seed 99 --trajectories 3");
        CHECK(rc == 0);
        const json m = manifest_of(out);
        CHECK(m.at("seed") == 99);
        const RunConfig saved = load_config((out / "config.json").string());
        CHECK(saved.seed == 99);
        CHECK(saved.n_trajectories == 3);
        CHECK(line_count(out / "twa_snapshots.csv") == 1 + 5 * 3);
    }
    SUBCASE("a bad config makes the exit code nonzero and names the problem") {
        const fs::path cfg = base / "bad.json";
        std::ofstream(cfg) << "{\"frobnicate\": 1}";
        std::string output;
        const int rc = run_cli("twa --config " + cfg.string() + " --out " + (base / "x").string(),
                               &output);
        CHECK(rc != 0);
        CHECK(output.find("frobnicate") != std::string::npos);
    }
    SUBCASE("unknown profile fails cleanly") {
        std::string output;
        const int rc =
            run_cli("analyze --profile no-such-profile --out " + (base / "y").string(), &output);
        CHECK(rc != 0);
        CHECK(output.find("no-such-profile") != std::string::npos);
    }
    SUBCASE("render turns a distribution file into SVG with machine-readable signs") {
        PhaseSpaceDistribution d;
        d.kind = DistributionKind::wigner;
        d.t = 2.0;
        d.x_axis = linspace(-1.0, 1.0, 9);
        d.p_axis = linspace(-1.0, 1.0, 9);
        d.values.setZero(9, 9);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j) {
                const double r2 = d.x_axis(i) * d.x_axis(i) + d.p_axis(j) * d.p_axis(j);
                d.values(i, j) = (2.0 * r2 - 1.0) * std::exp(-r2) / M_PI;
            }
        const fs::path csv = base / "wigner_sample.csv";
        csvio::write_distribution(csv.string(), d);

        const fs::path svg = base / "wigner_sample.svg";
        CHECK(run_cli("render " + csv.string() + " --out " + svg.string()) == 0);
        const std::string body = slurp(svg);
        CHECK(body.find("<svg") != std::string::npos);
        CHECK(body.rfind("</svg>") != std::string::npos);
        CHECK(body.find("class=\"neg\"") != std::string::npos);  // negative core is marked

        // Non-negative distributions must not carry the negative marker.
        PhaseSpaceDistribution h = d;
        h.kind = DistributionKind::histogram;
        h.values = d.values.cwiseAbs();
        const fs::path hcsv = base / "hist_sample.csv";
        csvio::write_distribution(hcsv.string(), h);
        CHECK(run_cli("render " + hcsv.string()) == 0);  // default output: .csv -> .svg
        const std::string hbody = slurp(base / "hist_sample.svg");
        CHECK(hbody.find("<svg") != std::string::npos);
        CHECK(hbody.find("class=\"neg\"") == std::string::npos);
    }
    SUBCASE("missing subcommand is an error") {
        CHECK(run_cli("") != 0);
    }
}
