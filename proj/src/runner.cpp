#include "qchaos/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qchaos/csvio.hpp"
#include "qchaos/ensemble.hpp"
#include "qchaos/master.hpp"
#include "qchaos/phasespace.hpp"
#include "qchaos/svg.hpp"

namespace qchaos {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num_tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<double> run_sample_times(const RunConfig& c) {
    TrajectoryOptions topt;
    topt.t_final = c.t_final;
    topt.dt = c.dt;
    topt.sample_interval = c.sample_interval;
    return sample_times(topt);
}

std::size_t row_index_of(const std::vector<double>& times, double t) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) < 1e-9) return i;
    throw std::invalid_argument("analysis time " + std::to_string(t) +
                                " is not on the sample-time grid");
}

// Emits a file path into the manifest output list (paths relative to the run
// directory, forward slashes).
void note_output(std::vector<std::string>& outputs, const fs::path& rel) {
    outputs.push_back(rel.lexically_normal().generic_string());
}

std::vector<csvio::ObservablesRow> ensemble_rows(const EnsembleResult& r) {
    const MeanSeries mx = reduce_series(r, &TrajectorySeries::mean_x);
    const MeanSeries mp = reduce_series(r, &TrajectorySeries::mean_p);
    const MeanSeries mx2 = reduce_series(r, &TrajectorySeries::mean_x2);
    const MeanSeries mp2 = reduce_series(r, &TrajectorySeries::mean_p2);
    const MeanSeries sz = reduce_series(r, &TrajectorySeries::sigma_z);
    const std::vector<double> big_width = nonselective_width_series(r);
    const std::vector<double> small_width = selective_width_series(r);
    const bool with_fock = !r.trajectories.empty() && !r.trajectories.front().mean_n.empty();
    std::vector<double> nbar, dn;
    if (with_fock) {
        nbar = nonselective_mean_photon_series(r);
        dn = nonselective_photon_variance_series(r);
    }

    std::vector<csvio::ObservablesRow> rows(r.times.size());
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        auto& row = rows[i];
        row.t = r.times[i];
        row.mean_x = mx.mean[i];
        row.mean_p = mp.mean[i];
        row.var_x = mx2.mean[i] - mx.mean[i] * mx.mean[i];
        row.var_p = mp2.mean[i] - mp.mean[i] * mp.mean[i];
        row.Delta_xp = big_width[i];
        row.delta_xp = small_width[i];
        row.sigma_z = sz.mean[i];
        if (with_fock) {
            row.mean_n = nbar[i];
            row.Delta_n = dn[i];
        }
    }
    return rows;
}

/** Quantum-trajectory pipeline shared by modes `trajectories` and `analyze`:
 *  runs the ensemble, fills the time-series rows (entanglement/purity/Wigner
 *  columns at the analysis times), writes observables.csv + jumps.csv + a
 *  final-state snapshot, and optionally the per-time distribution files. */
void run_quantum_pipeline(const RunConfig& c, const fs::path& dir, const fs::path& rel_dir,
                          bool with_distributions, std::vector<std::string>& outputs) {
    const QuadratureGrid grid = c.grid.make();
    EnsembleOptions opt;
    opt.n_trajectories = c.n_trajectories;
    opt.t_final = c.t_final;
    opt.dt = c.dt;
    opt.sample_interval = c.sample_interval;
    opt.seed = c.seed;
    opt.mode = c.drive;
    opt.well = c.well;
    opt.fock_n_max = c.fock_n_max;
    if (c.fock_n_max > 0) opt.projection_times = c.analysis_times;

    const EnsembleResult r = run_ensemble(c.params, grid, opt);
    std::vector<csvio::ObservablesRow> rows = ensemble_rows(r);

    // TWA ensemble for the histogram companions of the Wigner snapshots.
    std::vector<std::vector<SemiclassicalState>> twa_snaps;
    if (with_distributions && !opt.projection_times.empty()) {
        const TWAEnsemble ens = sample_initial_ensemble(c.params, c.n_trajectories, c.seed, c.well);
        twa_snaps = ensemble_snapshots(ens, opt.projection_times, {}, c.drive);
    }

    for (std::size_t k = 0; k < opt.projection_times.size(); ++k) {
        const double t = opt.projection_times[k];
        const std::size_t i = row_index_of(r.times, t);
        const BipartiteDensityMatrix rho = density_at(r, k);
        rows[i].E_N = negativity(rho);
        rows[i].purity = purity(rho);
        const PhotonStatistics stats = photon_statistics(rho);
        rows[i].mean_n = stats.mean_n;
        rows[i].Delta_n = stats.delta_n;

        const FieldKernel kernel = field_kernel_from_density(rho, grid);
        const PhaseSpaceDistribution w = wigner(kernel);
        rows[i].N_minus = negative_fraction(w).n_minus;

        if (with_distributions) {
            const std::string tag = num_tag(t);
            csvio::write_distribution((dir / ("wigner_t" + tag + ".csv")).string(), w);
            render_heatmap((dir / ("wigner_t" + tag + ".svg")).string(), w);
            note_output(outputs, rel_dir / ("wigner_t" + tag + ".csv"));
            note_output(outputs, rel_dir / ("wigner_t" + tag + ".csv.json"));
            note_output(outputs, rel_dir / ("wigner_t" + tag + ".svg"));

            const PhaseSpaceDistribution q = husimi_from_wigner(w);
            csvio::write_distribution((dir / ("husimi_t" + tag + ".csv")).string(), q);
            render_heatmap((dir / ("husimi_t" + tag + ".svg")).string(), q);
            note_output(outputs, rel_dir / ("husimi_t" + tag + ".csv"));
            note_output(outputs, rel_dir / ("husimi_t" + tag + ".csv.json"));
            note_output(outputs, rel_dir / ("husimi_t" + tag + ".svg"));

            const PhaseSpaceDistribution h =
                histogram_distribution(twa_snaps[k], w.x_axis, w.p_axis, t);
            csvio::write_distribution((dir / ("twa_hist_t" + tag + ".csv")).string(), h);
            render_heatmap((dir / ("twa_hist_t" + tag + ".svg")).string(), h);
            note_output(outputs, rel_dir / ("twa_hist_t" + tag + ".csv"));
            note_output(outputs, rel_dir / ("twa_hist_t" + tag + ".csv.json"));
            note_output(outputs, rel_dir / ("twa_hist_t" + tag + ".svg"));
        }
    }

    csvio::write_observables_csv((dir / "observables.csv").string(), rows);
    note_output(outputs, rel_dir / "observables.csv");

    std::vector<JumpRecord> records(r.trajectories.size());
    for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
        records[i].trajectory_id = i;
        records[i].seed = c.seed;
        records[i].times = r.trajectories[i].jump_times;
    }
    csvio::write_jumps_csv((dir / "jumps.csv").string(), records);
    note_output(outputs, rel_dir / "jumps.csv");

    // Re-run trajectory 0 to persist its final state in the binary container.
    TrajectoryOptions topt;
    topt.t_final = c.t_final;
    topt.dt = c.dt;
    topt.sample_interval = c.t_final;  // only t = 0 and t_final
    topt.seed = c.seed;
    topt.trajectory_id = 0;
    topt.mode = c.drive;
    topt.well = c.well;
    const TrajectoryResult traj0 = run_trajectory(c.params, grid, topt);
    csvio::write_spinor_snapshot((dir / "final_state_traj0.qsnap").string(),
                                 traj0.snapshots.back());
    note_output(outputs, rel_dir / "final_state_traj0.qsnap");
}

void run_twa_mode(const RunConfig& c, const fs::path& dir, std::vector<std::string>& outputs) {
    const TWAEnsemble ens = sample_initial_ensemble(c.params, c.n_trajectories, c.seed, c.well);
    const std::vector<double> times = run_sample_times(c);
    const auto snaps = ensemble_snapshots(ens, times, {}, c.drive);
    csvio::write_twa_snapshots_csv((dir / "twa_snapshots.csv").string(), times, snaps);
    note_output(outputs, "twa_snapshots.csv");

    const double T = drive_period(c.params, c.drive);
    const int k_periods = static_cast<int>(std::floor(c.t_final / T + 1e-9));
    if (k_periods >= 1) {
        const auto strobe = stroboscopic_map(ens, k_periods, {}, c.drive);
        csvio::write_stroboscopic_csv((dir / "stroboscopic.csv").string(), strobe);
        note_output(outputs, "stroboscopic.csv");
    }
}

void run_oracle_mode(const RunConfig& c, const fs::path& dir, std::vector<std::string>& outputs,
                     json& manifest_extra) {
    const QuadratureGrid grid = c.grid.make();
    const SpinorState psi0 = build_initial_state(c.params, grid, c.well);
    const FockProjection proj = project_to_fock(psi0, c.fock_n_max);
    const BipartiteDensityMatrix rho0 = accumulate_density({proj});

    OracleDiagnostics diag;
    const auto rhos = direct_lindblad_oracle(c.params, c.fock_n_max, rho0, c.t_final,
                                             c.sample_interval, c.drive, c.oracle_tol, &diag);

    std::vector<csvio::ObservablesRow> rows(rhos.size());
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        const BipartiteDensityMatrix& rho = rhos[i];
        const QuadratureMoments q = quadrature_moments(rho);
        auto& row = rows[i];
        row.t = rho.t;
        row.mean_x = q.mean_x;
        row.mean_p = q.mean_p;
        row.var_x = q.mean_x2 - q.mean_x * q.mean_x;
        row.var_p = q.mean_p2 - q.mean_p * q.mean_p;
        row.Delta_xp = width_from_moments(q);
        row.sigma_z = sigma_z_expectation(rho);
        const PhotonStatistics stats = photon_statistics(rho);
        row.mean_n = stats.mean_n;
        row.Delta_n = stats.delta_n;
        row.E_N = negativity(rho);
        row.purity = purity(rho);
    }
    for (const double t : c.analysis_times) {
        const std::size_t i = row_index_of(
            [&] {
                std::vector<double> ts(rhos.size());
                for (std::size_t j = 0; j < rhos.size(); ++j) ts[j] = rhos[j].t;
                return ts;
            }(),
            t);
        const FieldKernel kernel = field_kernel_from_density(rhos[i], grid);
        rows[i].N_minus = negative_fraction(wigner(kernel)).n_minus;
    }
    csvio::write_observables_csv((dir / "observables.csv").string(), rows);
    note_output(outputs, "observables.csv");

    manifest_extra["oracle_diagnostics"] = {{"max_trace_error", diag.max_trace_error},
                                            {"max_hermiticity_error", diag.max_hermiticity_error},
                                            {"min_eigenvalue", diag.min_eigenvalue},
                                            {"max_cutoff_population", diag.max_cutoff_population},
                                            {"rhs_evaluations", diag.rhs_evaluations}};
}

void run_analyze_mode(const RunConfig& c, const fs::path& dir,
                      std::vector<std::string>& outputs) {
    const std::vector<double> kappas =
        c.kappa_sweep.empty() ? std::vector<double>{c.params.kappa} : c.kappa_sweep;
    for (const double kappa : kappas) {
        RunConfig sub = c;
        sub.params.kappa = kappa;
        sub.kappa_sweep.clear();
        const std::string leaf = "kappa_" + num_tag(kappa);
        fs::create_directories(dir / leaf);
        run_quantum_pipeline(sub, dir / leaf, leaf, /*with_distributions=*/true, outputs);
    }
}

std::string iso_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

char hex_digit(std::uint64_t v) { return "0123456789abcdef"[v & 0xf]; }

std::string hex64(std::uint64_t v) {
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = hex_digit(v);
    return s;
}

}  // namespace

RunArtifacts run(const RunConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    save_config((dir / "config.json").string(), config);

    std::vector<std::string> outputs{"config.json"};
    json extra;
    std::string error;
    try {
        switch (config.mode) {
            case RunMode::twa: run_twa_mode(config, dir, outputs); break;
            case RunMode::trajectories:
                run_quantum_pipeline(config, dir, ".", /*with_distributions=*/false, outputs);
                break;
            case RunMode::master_oracle: run_oracle_mode(config, dir, outputs, extra); break;
            case RunMode::analyze: run_analyze_mode(config, dir, outputs); break;
        }
    } catch (const std::exception& e) {
        error = e.what();
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest;
    manifest["version"] = kVersion;
    manifest["config_hash"] = hex64(config_hash(config));
    manifest["seed"] = config.seed;
    manifest["mode"] = run_mode_name(config.mode);
    manifest["outputs"] = outputs;
    manifest["status"] = error.empty() ? "ok" : "error";
    if (!error.empty()) manifest["error"] = error;
    for (auto& [key, value] : extra.items()) manifest[key] = value;
    manifest["timing"] = {{"wall_time_s", wall}, {"written_at", iso_utc_now()}};

    const fs::path manifest_path = dir / "manifest.json";
    {
        std::ofstream f(manifest_path);
        if (!f) throw std::runtime_error("cannot open for writing: " + manifest_path.string());
        f << manifest.dump(2) << '\n';
    }
    if (!error.empty()) throw std::runtime_error(error);
    return {manifest_path.string(), outputs};
}

}  // namespace qchaos
