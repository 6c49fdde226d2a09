#include "qchaos/model.hpp"

#include <cmath>
#include <stdexcept>

namespace qchaos {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("ModelParams: ") + name + " must be finite");
}
}  // namespace

void ModelParams::validate() const {
    require_finite(omega, "omega");
    require_finite(Omega, "Omega");
    require_finite(g, "g");
    require_finite(eta0, "eta0");
    require_finite(omega_c, "omega_c");
    require_finite(omega_d, "omega_d");
    require_finite(kappa, "kappa");
    if (omega != 1.0) throw std::invalid_argument("ModelParams: omega is the unit scale and must equal 1");
    if (Omega < 0) throw std::invalid_argument("ModelParams: Omega must be >= 0");
    if (kappa < 0) throw std::invalid_argument("ModelParams: kappa must be >= 0");
}

void to_json(nlohmann::json& j, const ModelParams& p) {
    j = nlohmann::json{{"omega", p.omega},     {"Omega", p.Omega},       {"g", p.g},
                       {"eta0", p.eta0},       {"omega_c", p.omega_c},   {"omega_d", p.omega_d},
                       {"kappa", p.kappa}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
    static const char* known[] = {"omega", "Omega", "g", "eta0", "omega_c", "omega_d", "kappa"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || (item.key() == k);
        if (!ok) throw std::invalid_argument("ModelParams: unknown key \"" + item.key() + "\"");
    }
    p = ModelParams{};
    p.omega = j.value("omega", p.omega);
    p.Omega = j.value("Omega", p.Omega);
    p.g = j.value("g", p.g);
    p.eta0 = j.value("eta0", p.eta0);
    p.omega_c = j.value("omega_c", p.omega_c);
    p.omega_d = j.value("omega_d", p.omega_d);
    p.kappa = j.value("kappa", p.kappa);
    p.validate();
}

double drive_amplitude(const ModelParams& p, double t, DriveMode mode) {
    return mode == DriveMode::constant ? p.eta0 : p.eta0 * std::cos(p.omega_c * t);
}

double vector_potential(const ModelParams& p, double t, DriveMode mode) {
    return kSqrt2 * drive_amplitude(p, t, mode) * std::sin(p.omega_d * t);
}

double drive_x_coupling(const ModelParams& p, double t, DriveMode mode) {
    return kSqrt2 * drive_amplitude(p, t, mode) * std::cos(p.omega_d * t);
}

double adiabatic_gap(const ModelParams& p, double x) {
    return 2.0 * std::hypot(0.5 * p.Omega, kSqrt2 * p.g * x);
}

double adiabatic_potential(const ModelParams& p, double x, double t, AdiabaticBranch branch, DriveMode mode) {
    const double tilt = drive_x_coupling(p, t, mode) * x;
    const double split = 0.5 * adiabatic_gap(p, x);
    return 0.5 * x * x + tilt + (branch == AdiabaticBranch::upper ? split : -split);
}

double steady_state_displacement(const ModelParams& p) {
    const double g2 = p.g * p.g;
    if (4.0 * g2 <= p.Omega)
        throw std::domain_error("steady_state_displacement: requires g^2 > Omega/4");
    return p.g * std::sqrt(2.0 - p.Omega * p.Omega / (8.0 * g2 * g2));
}

std::vector<FixedPoint> fixed_points(const ModelParams& p) {
    std::vector<FixedPoint> fps;
    const bool above = 4.0 * p.g * p.g > p.Omega;
    fps.push_back({0.0, !above});
    if (above) {
        const double xs = steady_state_displacement(p);
        fps.push_back({-xs, true});
        fps.push_back({+xs, true});
    }
    return fps;
}

std::array<double, 2> lower_adiabatic_qubit_state(const ModelParams& p, double x) {
    const double a = 0.5 * p.Omega;
    const double b = kSqrt2 * p.g * x;
    if (b == 0.0) return {0.0, 1.0};  // bare ground state |1>
    const double E = std::hypot(a, b);
    // (b, -(a+E)) is an eigenvector with eigenvalue -E; no cancellation for any b.
    double v0 = b, v1 = -(a + E);
    const double nrm = std::hypot(v0, v1);
    v0 /= nrm;
    v1 /= nrm;
    if (v0 < 0) {
        v0 = -v0;
        v1 = -v1;
    }
    return {v0, v1};
}

std::array<double, 3> bloch_vector(const std::array<double, 2>& q) {
    return {2.0 * q[0] * q[1], 0.0, q[0] * q[0] - q[1] * q[1]};
}

}  // namespace qchaos
