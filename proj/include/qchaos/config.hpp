// config.hpp — run configuration: JSON load/save with strict key checking,
// named parameter profiles, and a stable hash for run manifests.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qchaos/grid.hpp"
#include "qchaos/model.hpp"

namespace qchaos {

enum class RunMode { twa, trajectories, master_oracle, analyze };

struct GridSpec {
    int n_points = 1024;
    double x_min = -20.0;
    double x_max = 20.0;

    QuadratureGrid make() const { return {n_points, x_min, x_max}; }
    bool operator==(const GridSpec&) const = default;
};

struct RunConfig {
    ModelParams params;
    RunMode mode = RunMode::trajectories;
    DriveMode drive = DriveMode::modulated;
    Well well = Well::right;
    std::size_t n_trajectories = 100;
    double t_final = 50.0;
    double dt = 1e-3;
    double sample_interval = 0.5;
    GridSpec grid;
    int fock_n_max = 0;  // 0 disables Fock-basis analyses
    std::uint64_t seed = 12345;
    std::string output_dir = "out";
    double oracle_tol = 1e-8;                // adaptive-step tolerance (master_oracle)
    std::vector<double> kappa_sweep;         // analyze: run once per value; empty = params.kappa
    std::vector<double> analysis_times;      // analyze: distribution snapshot times

    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/** Named parameter profile; currently "paper-fig3" (the kappa-sweep working
 *  point Omega = omega_d = 1, omega_c = g = 1.5, eta0 = 3). */
RunConfig profile(const std::string& name);

/** Parses and validates a JSON config.  Missing keys fall back to defaults,
 *  unknown keys are rejected, and errors carry file:line diagnostics. */
RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& config);

/** Deterministic canonical serialization (sorted keys) and its FNV-1a hash;
 *  the manifest stores the hash so a run can be matched to its exact config. */
std::string canonical_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

const char* run_mode_name(RunMode m);

}  // namespace qchaos
