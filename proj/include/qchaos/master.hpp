// master.hpp — direct density-matrix propagation in the truncated qubit⊗Fock
// basis.  Independent of the grid/split-operator path; used as the reference
// the stochastic unraveling must average to.
#pragma once

#include <vector>

#include "qchaos/model.hpp"
#include "qchaos/observables.hpp"

namespace qchaos {

struct OracleDiagnostics {
    double max_trace_error = 0.0;       ///< max |Tr rho - 1| over samples
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;        ///< most negative eigenvalue seen
    double max_cutoff_population = 0.0;  ///< occupation of the top two Fock levels
    long long rhs_evaluations = 0;
};

/**
 * Integrates d(rho)/dt = i[rho, H(t)] + kappa (2 x rho x - x^2 rho - rho x^2)
 * with H(t) = omega n̂ + (Omega/2) sigma_z + sqrt(2) g x̂ sigma_x
 *           + f(t) x̂ + A(t) p̂   (c-number terms dropped; they commute out),
 * using the shared adaptive Runge-Kutta stepper, single-threaded.
 *
 * Returns rho sampled at t = 0, dt, 2dt, ..., t_final (dt must divide
 * t_final).  The initial state must be supported below the cutoff (population
 * of the top two Fock levels < 1e-8) and the evolution must keep it there
 * (< 1e-4, monitored at every sample), else throws.
 */
std::vector<BipartiteDensityMatrix> direct_lindblad_oracle(
    const ModelParams& params, int n_max, const BipartiteDensityMatrix& rho0, double t_final,
    double dt, DriveMode mode = DriveMode::modulated, double tol = 1e-8,
    OracleDiagnostics* diagnostics = nullptr);

}  // namespace qchaos
