// qchaos — mean-field and quantum-trajectory runs of the driven Rabi model.
//
// Subcommands: twa, trajectories, oracle, analyze (pipeline runs) and render
// (distribution CSV -> SVG heatmap).  Every run writes config.json and
// manifest.json into the output directory so it can be reproduced exactly.
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qchaos/csvio.hpp"
#include "qchaos/runner.hpp"
#include "qchaos/svg.hpp"

namespace {

struct RunFlags {
    std::string config_path;
    std::string profile_name;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> kappa;
    std::optional<std::size_t> n_trajectories;
};

void execute_run(const RunFlags& flags, qchaos::RunMode mode) {
    qchaos::RunConfig config;
    if (!flags.profile_name.empty()) config = qchaos::profile(flags.profile_name);
    if (!flags.config_path.empty()) config = qchaos::load_config(flags.config_path);
    config.mode = mode;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.kappa) {
        config.params.kappa = *flags.kappa;
        config.kappa_sweep.clear();
    }
    if (flags.n_trajectories) config.n_trajectories = *flags.n_trajectories;
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    // Mode-specific fallbacks so the subcommands work without a config file.
    if (mode == qchaos::RunMode::master_oracle && config.fock_n_max == 0) config.fock_n_max = 60;
    if (mode == qchaos::RunMode::analyze && config.analysis_times.empty())
        config.analysis_times = {config.t_final};

    const qchaos::RunArtifacts artifacts = qchaos::run(config);
    std::cout << "wrote " << artifacts.manifest_path << " (" << artifacts.outputs.size()
              << " output files)\n";
}

void add_run_subcommand(CLI::App& app, const char* name, const char* description,
                        qchaos::RunMode mode) {
    auto* cmd = app.add_subcommand(name, description);
    auto flags = std::make_shared<RunFlags>();
    auto* config_opt = cmd->add_option("--config", flags->config_path, "JSON run configuration");
    cmd->add_option("--profile", flags->profile_name, "named parameter profile, e.g. paper-fig3")
        ->excludes(config_opt);
    cmd->add_option("--out", flags->out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", flags->seed, "RNG seed (overrides config)");
    cmd->add_option("--kappa", flags->kappa, "measurement rate (overrides config and any sweep)");
    cmd->add_option("--trajectories", flags->n_trajectories,
                    "ensemble size (overrides config)");
    cmd->callback([flags, mode]() { execute_run(*flags, mode); });
}

void add_render_subcommand(CLI::App& app) {
    auto* cmd = app.add_subcommand("render", "render a distribution CSV as an SVG heatmap");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("input", *input, "distribution CSV (with its .json sidecar)")->required();
    cmd->add_option("--out", *out, "output SVG path (default: input with .svg)");
    cmd->callback([input, out]() {
        const qchaos::PhaseSpaceDistribution dist = qchaos::csvio::read_distribution(*input);
        std::string svg_path = *out;
        if (svg_path.empty()) {
            svg_path = *input;
            const auto dot = svg_path.rfind(".csv");
            svg_path = (dot == std::string::npos ? svg_path : svg_path.substr(0, dot)) + ".svg";
        }
        qchaos::render_heatmap(svg_path, dist);
        std::cout << "wrote " << svg_path << '\n';
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven Rabi model: mean-field and quantum-trajectory simulator"};
    app.require_subcommand(1);
    add_run_subcommand(app, "twa", "classical (truncated Wigner) ensemble", qchaos::RunMode::twa);
    add_run_subcommand(app, "trajectories", "quantum-jump trajectory ensemble",
                       qchaos::RunMode::trajectories);
    add_run_subcommand(app, "oracle", "direct density-matrix evolution (small cutoffs)",
                       qchaos::RunMode::master_oracle);
    add_run_subcommand(app, "analyze", "trajectory ensemble plus phase-space distributions",
                       qchaos::RunMode::analyze);
    add_render_subcommand(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
