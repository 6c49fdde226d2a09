// observables.hpp — truncated Fock-basis representation of the qubit⊗field
// state and the derived quantities: negativity, purity, photon statistics,
// qubit inversion.
//
// Basis layout: the flattened index is s*(n_max+1) + n where s is the qubit
// component (0 = |2>, the sigma_z=+1 state; 1 = |1>) and n the Fock level.
// Every routine in this header and in the Lindblad propagator uses this
// layout; do not mix with an interleaved one.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qchaos/grid.hpp"
#include "qchaos/quantum.hpp"

namespace qchaos {

/** Expansion of one trajectory state over Hermite (Fock) functions. */
struct FockProjection {
    int n_max = 0;
    double t = 0.0;
    Eigen::VectorXcd coefficients;  ///< size 2*(n_max+1), layout s*(n_max+1)+n
    double leakage = 0.0;           ///< 1 - sum |c|^2, >= 0 up to quadrature error

    int dim() const { return 2 * (n_max + 1); }
};

/** Qubit ⊗ truncated-Fock density operator (ensemble average of projectors). */
struct BipartiteDensityMatrix {
    int n_max = 0;
    double t = 0.0;
    int n_trajectories_accumulated = 0;
    Eigen::MatrixXcd entries;  ///< dimension 2*(n_max+1), Hermitian, unit trace

    int dim() const { return 2 * (n_max + 1); }
    double trace_real() const;
    /** max |rho - rho^dagger| entry. */
    double hermiticity_error() const;
    /** smallest eigenvalue of (rho + rho^dagger)/2. */
    double min_eigenvalue() const;
    /** Throws std::runtime_error if Hermiticity/trace/positivity bounds fail. */
    void check_invariants(double herm_tol = 1e-12, double trace_tol = 1e-9,
                          double eig_floor = -1e-8) const;
};

/** Orthonormal Hermite functions phi_0..phi_n_max sampled on the grid,
 *  returned as an (n_max+1) x n_points matrix (row n = phi_n).  Recurrence:
 *  phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1}. */
Eigen::MatrixXd hermite_basis(const QuadratureGrid& grid, int n_max);

/** c_{s,n} = integral phi_n(x) psi_s(x) dx by grid quadrature.
 *  Requires dx*sqrt(2*n_max+1) < 1 (grid resolves the top basis function)
 *  and leakage below the tolerance, else throws. */
FockProjection project_to_fock(const SpinorState& state, int n_max,
                               double leakage_tolerance = 1e-6);
/** Same, reusing a precomputed hermite_basis(grid, n_max) for ensembles. */
FockProjection project_to_fock(const SpinorState& state, const Eigen::MatrixXd& basis,
                               double leakage_tolerance = 1e-6);

/** rho = (1/N) sum_i |c_i><c_i|.  All projections must share n_max and t. */
BipartiteDensityMatrix accumulate_density(const std::vector<FockProjection>& projections);

/** Entanglement negativity: partial transpose over the qubit index (2x2 block
 *  transpose), Hermitian eigensolve, returns the sum of negative eigenvalues
 *  (non-positive by convention; 0 for any product state). */
double negativity(const BipartiteDensityMatrix& rho);

/** Tr[rho^2]. */
double purity(const BipartiteDensityMatrix& rho);

struct PhotonStatistics {
    double mean_n = 0.0;
    double delta_n = 0.0;        ///< sqrt(<n^2> - <n>^2)
    double scaled_variance = 0.0;  ///< delta_n / mean_n
};

/** First and second quadrature moments of one state (or one ensemble). */
struct QuadratureMoments {
    double mean_x = 0.0;
    double mean_x2 = 0.0;
    double mean_p = 0.0;
    double mean_p2 = 0.0;
};

/** <x>, <x^2>, <p>, <p^2> of a Fock-basis density matrix (ladder-operator
 *  band sums; no dense operator matrices). */
QuadratureMoments quadrature_moments(const BipartiteDensityMatrix& rho);

/** Number-operator moments in the Fock basis.  Throws std::domain_error when
 *  mean_n < 1e-6 (the scaled variance is undefined there). */
PhotonStatistics photon_statistics(const BipartiteDensityMatrix& rho);
PhotonStatistics photon_statistics(const std::vector<FockProjection>& ensemble);

/** <sigma_z> = ||psi_2||^2 - ||psi_1||^2 (grid) or Tr[(sigma_z ⊗ 1) rho]. */
double sigma_z_expectation(const SpinorState& state);
double sigma_z_expectation(const BipartiteDensityMatrix& rho);

}  // namespace qchaos
