// phasespace.hpp — Wigner and Husimi distributions, negative fractions,
// marginals, phase-space widths, and histogram/time-average utilities.
//
// Wigner convention: W(x,p) = (1/2pi) ∫ dy rho(x - y/2, x + y/2) e^{i p y},
// which normalizes to ∬ W dx dp = 1 and gives the vacuum W(0,0) = 1/pi.
// On the quadrature grid y runs over even multiples of dx, so the transform
// is an FFT of length n_points at every grid position (fast path); arbitrary
// output axes use a direct sum.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qchaos/grid.hpp"
#include "qchaos/observables.hpp"
#include "qchaos/quantum.hpp"
#include "qchaos/semiclassical.hpp"

namespace qchaos {

enum class DistributionKind { wigner, husimi, histogram };
enum class DistributionSource { single_trajectory, ensemble_average };

struct PhaseSpaceDistribution {
    DistributionKind kind = DistributionKind::wigner;
    DistributionSource source = DistributionSource::single_trajectory;
    double t = 0.0;
    Eigen::VectorXd x_axis;  // uniform, ascending
    Eigen::VectorXd p_axis;  // uniform, ascending
    Eigen::MatrixXd values;  // values(i, j) at (x_axis[i], p_axis[j])

    double dx() const;
    double dp() const;
    double integral() const;  // sum * dx * dp
};

/** Reduced field state as a position kernel rho(x, x') on the grid. */
struct FieldKernel {
    QuadratureGrid grid;
    double t = 0.0;
    Eigen::MatrixXcd rho;  // rho(j, k) = rho(x_j, x_k)

    double trace() const;  // sum of diagonal * dx
    double hermiticity_error() const;
};

/** rho_f(x,x') = sum_s psi_s(x) psi_s(x')^* (qubit traced out, pure state). */
FieldKernel field_kernel(const SpinorState& state);

/** acc.rho += weight * kernel of state (for streaming ensemble averages).
 *  acc must either be empty (zero-size rho) or match the state's grid. */
void accumulate_field_kernel(FieldKernel& acc, const SpinorState& state, double weight);

/** Reconstructs the position kernel of the field part of a qubit⊗Fock density
 *  matrix: rho_f(x,x') = sum_s sum_{nm} rho[(s,n),(s,m)] phi_n(x) phi_m(x'). */
FieldKernel field_kernel_from_density(const BipartiteDensityMatrix& rho,
                                      const QuadratureGrid& grid);

/** Wigner transform on the kernel's native axes: x = grid points, p = the
 *  half-step Fourier duals pi*l/(n dx), l = -n/2..n/2-1.  Throws on a
 *  non-Hermitian kernel; asserts the imaginary residue is below 1e-10 of the
 *  peak before discarding it. */
PhaseSpaceDistribution wigner(const FieldKernel& kernel);

/** Same transform sampled on arbitrary uniform axes (direct sum; x values
 *  snap to the nearest grid point). */
PhaseSpaceDistribution wigner(const FieldKernel& kernel, const Eigen::VectorXd& x_axis,
                              const Eigen::VectorXd& p_axis);

/** Q(x,p) = (1/pi) ∬ dx' dp' e^{-(x-x')^2 - (p-p')^2} W(x',p'), evaluated as
 *  a separable convolution.  Requires at least 6 samples per unit on both
 *  axes; clamps negative residue (must stay above -1e-12 of the peak). */
PhaseSpaceDistribution husimi_from_wigner(const PhaseSpaceDistribution& w);

struct NegativeFraction {
    double n_minus = 0.0;  // ∬ min(W,0) dx dp  (<= 0)
    double n_plus = 0.0;   // ∬ max(W,0) dx dp  (>= 0)
};
NegativeFraction negative_fraction(const PhaseSpaceDistribution& w);

/** sqrt(Var(x) Var(p)); negative variances beyond -1e-10 are an error. */
double width_from_moments(const QuadratureMoments& m);

/** Width of the trajectory-averaged state: average the moments, then take
 *  the width. */
double nonselective_width(const std::vector<QuadratureMoments>& per_trajectory);

/** Average of the per-trajectory widths: take each width, then average. */
double selective_width(const std::vector<QuadratureMoments>& per_trajectory);

struct Marginals {
    QuadratureGrid grid;
    Eigen::ArrayXd position;  // P(x_j), grid order
    Eigen::ArrayXd momentum;  // P(k_l), ascending in k with spacing 2pi/(n dx)
    Eigen::ArrayXd momentum_axis;
};

Marginals marginals(const SpinorState& state);
Marginals marginals(const FieldKernel& kernel);

/** Marginals of a computed distribution by integrating out one axis. */
Eigen::ArrayXd position_marginal(const PhaseSpaceDistribution& d);
Eigen::ArrayXd momentum_marginal(const PhaseSpaceDistribution& d);

/** |<p|psi>|^2 on arbitrary p values (direct transform; for cross-checks). */
Eigen::ArrayXd momentum_marginal_at(const SpinorState& state, const Eigen::VectorXd& p_axis);

/** Pointwise time average of distributions sharing kind and axes. */
PhaseSpaceDistribution time_averaged_distribution(
    const std::vector<PhaseSpaceDistribution>& series);

/** Normalized 2D histogram of semiclassical ensemble members. */
PhaseSpaceDistribution histogram_distribution(const std::vector<SemiclassicalState>& members,
                                              const Eigen::VectorXd& x_axis,
                                              const Eigen::VectorXd& p_axis, double t);

/** Histogram accumulated over several snapshot times (time-averaged TWA). */
PhaseSpaceDistribution histogram_distribution(
    const std::vector<std::vector<SemiclassicalState>>& snapshots,
    const Eigen::VectorXd& x_axis, const Eigen::VectorXd& p_axis);

/** Shannon entropy -sum q ln q of the normalized cell masses (requires a
 *  non-negative distribution: histogram or husimi). */
double distribution_entropy(const PhaseSpaceDistribution& d);

/** Jaccard overlap |A ∩ B| / |A ∪ B| of the level sets
 *  {|values| > level_fraction * max|values|}; axes must match. */
double jaccard_overlap(const PhaseSpaceDistribution& a, const PhaseSpaceDistribution& b,
                       double level_fraction);

/** Sum of |first differences| along both axes inside a box of the given
 *  half-width around the distribution's maximum (fine-structure metric). */
double total_variation_around_max(const PhaseSpaceDistribution& d, double half_width);

/** Sum of |first differences| of a 1D profile. */
double total_variation(const Eigen::ArrayXd& profile);

/** Uniform axis helper. */
Eigen::VectorXd linspace(double lo, double hi, int n);

}  // namespace qchaos
