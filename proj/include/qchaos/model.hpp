// model.hpp — driven Rabi model: parameters, drive, adiabatic potentials,
// steady-state displacements and the adiabatic qubit states.
//
// Dimensionless convention throughout: the bare oscillator frequency omega
// is the unit of energy/time (omega = 1) and hbar = 1, so x and p are the
// usual dimensionless quadratures.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"

namespace qchaos {

/** System parameters.  Defaults are the strongly chaotic working point used
 *  for most runs (deep in the ultrastrong-coupling, above the pitchfork
 *  threshold g^2 > Omega/4). */
struct ModelParams {
    double omega = 1.0;    // oscillator frequency; fixed unit scale, must stay 1
    double Omega = 1.0;    // qubit splitting
    double g = 1.5;        // qubit-oscillator coupling
    double eta0 = 3.0;     // drive amplitude scale
    double omega_c = 1.5;  // amplitude-modulation frequency of the drive
    double omega_d = 1.0;  // drive carrier frequency
    double kappa = 0.0;    // position-measurement (decoherence) rate

    void validate() const;
    bool operator==(const ModelParams&) const = default;
};

// Strict JSON (de)serialization: unknown keys are an error, omitted keys take
// the defaults above.
void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);

enum class DriveMode { modulated, constant };  // constant: eta(t) = eta0
enum class AdiabaticBranch { lower, upper };
enum class Well { left, right };  // which pitchfork minimum (-x_ss or +x_ss)

// eta(t) = eta0 * cos(omega_c t)  (or eta0 for the constant-amplitude mode).
double drive_amplitude(const ModelParams& p, double t, DriveMode mode = DriveMode::modulated);

// A(t) = sqrt(2) * eta(t) * sin(omega_d t); enters the kinetic term as (p + A)^2 / 2.
double vector_potential(const ModelParams& p, double t, DriveMode mode = DriveMode::modulated);

// Scalar x-coupling of the drive: sqrt(2) * eta(t) * cos(omega_d t).
double drive_x_coupling(const ModelParams& p, double t, DriveMode mode = DriveMode::modulated);

// V_pm(x,t) = x^2/2 + sqrt(2) eta(t) cos(omega_d t) x  +/-  sqrt(Omega^2/4 + 2 g^2 x^2).
double adiabatic_potential(const ModelParams& p, double x, double t, AdiabaticBranch branch,
                           DriveMode mode = DriveMode::modulated);

// Energy gap between the branches, 2*sqrt(Omega^2/4 + 2 g^2 x^2) >= Omega.
double adiabatic_gap(const ModelParams& p, double x);

struct FixedPoint {
    double x = 0.0;
    bool stable = false;
};

/** Steady-state displacements of the undriven (eta0 = 0) mean-field flow with
 *  the qubit following the lower adiabatic branch.  Below the pitchfork
 *  threshold g^2 <= Omega/4 only x = 0 exists (stable); above it x = 0 turns
 *  unstable and the pair +/- x_ss = +/- g*sqrt(2 - Omega^2/(8 g^4)) appears. */
std::vector<FixedPoint> fixed_points(const ModelParams& p);

// Closed-form well position for g^2 > Omega/4 (throws below threshold).
double steady_state_displacement(const ModelParams& p);

/** Normalized lower eigenvector of the position-dependent qubit matrix
 *      [[ Omega/2,        sqrt(2) g x ],
 *       [ sqrt(2) g x,   -Omega/2     ]]
 *  in the (|2>, |1>) ordering, i.e. component 0 multiplies the bare excited
 *  state.  The eigenvector is real; the first nonzero component is chosen
 *  positive.  Eigenvalue is -sqrt(Omega^2/4 + 2 g^2 x^2). */
std::array<double, 2> lower_adiabatic_qubit_state(const ModelParams& p, double x);

// Bloch components (u, v, Z) = (<sx>, <sy>, <sz>) of a real qubit vector.
std::array<double, 3> bloch_vector(const std::array<double, 2>& q);

}  // namespace qchaos
