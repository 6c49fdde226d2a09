// quantum.hpp — grid wavefunctions and the stochastic split-operator propagator.
//
// The two-component spinor psi_s(x) lives on a QuadratureGrid; component 0
// multiplies the bare excited qubit state |2> and component 1 the ground
// state |1> (so <sigma_z> = ||psi_0||^2 - ||psi_1||^2).  Time evolution uses
// Strang splitting: half-step in the position-diagonal potential (including
// the qubit matrix, exponentiated analytically per grid point), full kinetic
// step exp(-i dt (k + A(t_mid))^2 / 2) in momentum space, second half-step.
// Decoherence is unraveled as quantum jumps: deterministic decay
// exp(-kappa x^2 dt) plus stochastic application of the position operator.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "qchaos/fft.hpp"
#include "qchaos/grid.hpp"
#include "qchaos/model.hpp"

namespace qchaos {

struct SpinorState {
    QuadratureGrid grid;
    Eigen::ArrayXcd up;    // amplitude on |2>
    Eigen::ArrayXcd down;  // amplitude on |1>
    double t = 0.0;

    double norm2() const;                  // integral of |psi|^2
    void normalize();                      // scale to unit norm
    double mean_x() const;
    double mean_x2() const;
    double sigma_z() const;                // ||up||^2 - ||down||^2
    double boundary_ratio() const;         // max edge amplitude / peak amplitude
    bool finite() const;
};

/** Click record of one trajectory. */
struct JumpRecord {
    std::size_t trajectory_id = 0;
    std::uint64_t seed = 0;
    std::vector<double> times;  // strictly increasing
};

// Gaussian pi^{-1/4} exp(-(x -+ x_ss)^2/2) times the lower adiabatic qubit
// vector at the same minimum; normalized on the grid.  Throws if the grid is
// too narrow (boundary amplitude above 1e-6 of peak).
SpinorState build_initial_state(const ModelParams& p, const QuadratureGrid& grid,
                                Well well = Well::right);

/** Reusable propagator: owns FFT plans and the static phase tables for a
 *  fixed (params, grid, dt, drive mode).  One instance per worker thread. */
class SplitStepPropagator {
public:
    SplitStepPropagator(const ModelParams& p, const QuadratureGrid& grid, double dt,
                        DriveMode mode = DriveMode::modulated);
    ~SplitStepPropagator();
    SplitStepPropagator(const SplitStepPropagator&) = delete;
    SplitStepPropagator& operator=(const SplitStepPropagator&) = delete;

    const QuadratureGrid& grid() const;
    double dt() const;

    // One unitary Strang step from state.t to state.t + dt (norm preserved).
    void step(SpinorState& state) const;

    // step() followed by the no-jump decay exp(-kappa x^2 dt); returns the
    // squared-norm loss of the decay factor (0 when kappa == 0).
    double no_jump_step(SpinorState& state) const;

    // Momentum moments (<p>, <p^2>) of the current state.
    void momentum_moments(const SpinorState& state, double& mean_p, double& mean_p2) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot conveniences (build a propagator internally; fine for tests).
void split_step(SpinorState& state, const ModelParams& p, double dt, DriveMode mode = DriveMode::modulated);
double no_jump_step(SpinorState& state, const ModelParams& p, double dt,
                    DriveMode mode = DriveMode::modulated);

/** Jump decision for one step.  delta_p = 2 kappa dt <x^2> must stay below
 *  0.1 (throws otherwise).  With probability delta_p (decided by the caller's
 *  uniform draw) applies psi <- x psi / ||x psi|| and returns true; otherwise
 *  renormalizes the no-jump state and returns false. */
bool maybe_jump(SpinorState& state, double kappa, double dt, double uniform_draw,
                double* delta_p_out = nullptr);

struct TrajectoryOptions {
    double t_final = 50.0;
    double dt = 5e-4;
    double sample_interval = 0.5;  // must be an integer multiple of dt
    std::uint64_t seed = 12345;
    std::size_t trajectory_id = 0;
    DriveMode mode = DriveMode::modulated;
    Well well = Well::right;
};

struct TrajectoryDiagnostics {
    double max_boundary_ratio = 0.0;
    double max_delta_p = 0.0;
    std::size_t n_steps = 0;
};

struct TrajectoryResult {
    std::vector<double> times;
    std::vector<SpinorState> snapshots;  // state at each sample time
    JumpRecord jumps;
    TrajectoryDiagnostics diagnostics;
};

/** Runs one quantum trajectory.  The jump draws come from the Philox
 *  substream (seed, trajectory_id): the same arguments always reproduce the
 *  same trajectory, independent of any other trajectory being run.
 *  Aborts with a diagnostic if the state develops NaN/overflow, or if the
 *  edge-to-peak amplitude ratio checked at each sample time exceeds 1e-3
 *  (the periodic images would start contaminating the dynamics). */
TrajectoryResult run_trajectory(const ModelParams& p, const QuadratureGrid& grid,
                                const TrajectoryOptions& opts);

/** Streaming variant: visit(sample_index, state, propagator) is called at
 *  every sample time instead of storing snapshots; jump times are appended
 *  to jumps if non-null. */
void run_trajectory_visit(
    const ModelParams& p, const QuadratureGrid& grid, const TrajectoryOptions& opts,
    const std::function<void(std::size_t, const SpinorState&, const SplitStepPropagator&)>& visit,
    JumpRecord* jumps = nullptr, TrajectoryDiagnostics* diag = nullptr);

// Sample times implied by TrajectoryOptions (t = 0, si, 2 si, ..., t_final).
std::vector<double> sample_times(const TrajectoryOptions& opts);

}  // namespace qchaos
