// ensemble.hpp — quantum-trajectory ensembles: parallel trajectory map with
// per-trajectory result slots and sequential reductions, so every output is
// bit-identical for any worker count.
#pragma once

#include <cstdint>
#include <vector>

#include "qchaos/observables.hpp"
#include "qchaos/phasespace.hpp"
#include "qchaos/quantum.hpp"

namespace qchaos {

struct EnsembleOptions {
    std::size_t n_trajectories = 100;
    double t_final = 50.0;
    double dt = 1e-3;
    double sample_interval = 0.5;
    std::uint64_t seed = 12345;
    DriveMode mode = DriveMode::modulated;
    Well well = Well::right;
    /** Fock cutoff for per-sample photon moments and stored projections;
     *  0 disables all Fock-basis work. */
    int fock_n_max = 0;
    /** Sample times (must appear in the sample schedule) at which full Fock
     *  projections are kept for density-matrix accumulation. */
    std::vector<double> projection_times;
};

/** Scalar series of one trajectory, one entry per sample time. */
struct TrajectorySeries {
    std::size_t trajectory_id = 0;
    std::vector<double> mean_x, mean_p, mean_x2, mean_p2;
    std::vector<double> sigma_z;
    std::vector<double> width;             // sqrt(Var x * Var p) of the pure state
    std::vector<double> mean_n, mean_n2;   // Fock moments (empty if fock_n_max == 0)
    std::vector<double> jump_times;
    TrajectoryDiagnostics diagnostics;
};

struct EnsembleResult {
    EnsembleOptions options;
    std::vector<double> times;
    std::vector<TrajectorySeries> trajectories;  // index == trajectory_id
    /** projections[k][i]: trajectory i at projection_times[k]. */
    std::vector<std::vector<FockProjection>> projections;
};

/** Runs the ensemble.  Trajectories are distributed over workers; all
 *  per-trajectory data lands in its own slot. */
EnsembleResult run_ensemble(const ModelParams& params, const QuadratureGrid& grid,
                            const EnsembleOptions& options);

struct MeanSeries {
    std::vector<double> mean;            // ensemble mean per sample time
    std::vector<double> standard_error;  // std of the mean (0 for N = 1)
};

/** Sequential (index-ordered) mean and standard error of one stored series. */
MeanSeries reduce_series(const EnsembleResult& r,
                         const std::vector<double> TrajectorySeries::* field);

/** Delta_xp(t): width computed from the trajectory-averaged moments. */
std::vector<double> nonselective_width_series(const EnsembleResult& r);

/** delta_xp(t): mean of the per-trajectory pure-state widths. */
std::vector<double> selective_width_series(const EnsembleResult& r);

/** Delta_n(t) of the trajectory-averaged state: sqrt(<n^2>_rho - <n>_rho^2).
 *  Requires fock_n_max > 0. */
std::vector<double> nonselective_photon_variance_series(const EnsembleResult& r);

/** <n>(t) of the trajectory-averaged state. */
std::vector<double> nonselective_mean_photon_series(const EnsembleResult& r);

/** Accumulated density matrix at projection_times[k]. */
BipartiteDensityMatrix density_at(const EnsembleResult& r, std::size_t k);

/** Total jump count across the ensemble. */
std::size_t total_jumps(const EnsembleResult& r);

/** Power-spectrum (Shannon) entropy of a uniformly sampled signal: subtract
 *  the mean, take |DFT|^2 over positive frequencies, normalize to a
 *  probability vector q, return -sum q ln q.  Constant signals give 0. */
double spectral_entropy(const std::vector<double>& signal);

}  // namespace qchaos
