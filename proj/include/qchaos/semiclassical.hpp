// semiclassical.hpp — truncated-Wigner / mean-field dynamics.
//
// Phase-space coordinates (x, p) plus the qubit Bloch components (u, v, Z)
// with u^2 + v^2 + Z^2 = 1.  The flow is independent of kappa; decoherence
// enters only through the quantum unraveling.
#pragma once

#include <cstdint>
#include <vector>

#include "qchaos/integrate.hpp"
#include "qchaos/model.hpp"

namespace qchaos {

struct SemiclassicalState {
    double x = 0.0;
    double p = 0.0;
    double u = 0.0;  // <sx>
    double v = 0.0;  // <sy>
    double Z = 0.0;  // <sz>
};

struct TWAEnsemble {
    ModelParams params;
    std::uint64_t seed = 0;
    std::vector<SemiclassicalState> members;
};

/** Mean-field equations of motion:
 *    x' = p + sqrt(2) eta(t) sin(omega_d t)
 *    p' = -x - sqrt(2) g u - sqrt(2) eta(t) cos(omega_d t)
 *    u' = -(Omega/2) v
 *    v' =  (Omega/2) u - sqrt(2) g x Z
 *    Z' =  sqrt(2) g x v
 */
SemiclassicalState eom_derivative(const ModelParams& p, const SemiclassicalState& s, double t,
                                  DriveMode mode = DriveMode::modulated);

// Classical Hamiltonian function; conserved along trajectories when eta0 = 0.
double semiclassical_energy(const ModelParams& p, const SemiclassicalState& s, double t,
                            DriveMode mode = DriveMode::modulated);

/** Advances a state from t0 to t1 with the adaptive Dormand-Prince stepper.
 *  The Bloch vector is renormalized after any accepted step whose norm drift
 *  exceeds 1e-12.  Throws IntegrationError on step-size underflow. */
SemiclassicalState integrate(const ModelParams& p, SemiclassicalState s, double t0, double t1,
                             const IntegrateOptions& opts = {}, DriveMode mode = DriveMode::modulated);

/** Wigner-sampled initial conditions for a wavepacket in one well:
 *  x ~ N(+-x_ss, 1/2), p ~ N(0, 1/2), qubit pinned at (u,v,Z) = (-+1, 0, 0).
 *  Trajectory i draws from substream (seed, i), so the ensemble is
 *  reproducible independent of worker count. */
TWAEnsemble sample_initial_ensemble(const ModelParams& p, std::size_t n, std::uint64_t seed,
                                    Well well = Well::right);

/** Evolves every member through the given increasing sample times; visit is
 *  called as visit(member_index, time_index, state) from worker threads, each
 *  (member,time) pair exactly once. */
void evolve_ensemble(const TWAEnsemble& ens, const std::vector<double>& times,
                     const std::function<void(std::size_t, std::size_t, const SemiclassicalState&)>& visit,
                     const IntegrateOptions& opts = {}, DriveMode mode = DriveMode::modulated);

// Convenience form returning snapshots[time_index][member_index].
std::vector<std::vector<SemiclassicalState>> ensemble_snapshots(const TWAEnsemble& ens,
                                                                const std::vector<double>& times,
                                                                const IntegrateOptions& opts = {},
                                                                DriveMode mode = DriveMode::modulated);

/** Common period of the modulated drive: smallest T > 0 with both
 *  omega_d T and omega_c T integer multiples of 2*pi (T = 4*pi at the default
 *  working point).  Throws if the two frequencies are incommensurate. */
double drive_period(const ModelParams& p, DriveMode mode = DriveMode::modulated);

// Phase-space snapshots at t = k*T for k = 1..k_periods.
std::vector<std::vector<SemiclassicalState>> stroboscopic_map(const TWAEnsemble& ens, int k_periods,
                                                              const IntegrateOptions& opts = {},
                                                              DriveMode mode = DriveMode::modulated);

struct LyapunovOptions {
    double t_total = 2000.0;
    double renorm_interval = 1.0;
    double d0 = 1e-8;      // initial x-separation of the companion trajectory
    double max_step = 5e-3;  // target substep; rounded so it divides renorm_interval
};

/** Largest Lyapunov exponent by the two-trajectory (Benettin) method with
 *  periodic renormalization of the separation vector.
 *
 *  Uses a fixed-step RK4 whose substep exactly divides the renormalization
 *  interval.  With the same substep the reference trajectory is advanced
 *  through an identical step sequence for any integer ratio of intervals, so
 *  changing the renormalization cadence perturbs the estimate only through
 *  the (linear-regime, ~d0-sized) companion rescaling — an adaptive stepper
 *  restarted at the interval boundaries would instead follow a different
 *  pseudo-trajectory per cadence and scatter the finite-time estimate. */
double lyapunov_exponent(const ModelParams& p, const SemiclassicalState& s0,
                         const LyapunovOptions& opts = {}, DriveMode mode = DriveMode::modulated);

// sqrt(Var x * Var p) over ensemble members.
double classical_width(const std::vector<SemiclassicalState>& members);

}  // namespace qchaos
