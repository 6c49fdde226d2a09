#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "qchaos/model.hpp"
#include "qchaos/semiclassical.hpp"

using namespace qchaos;

namespace {
const double kXss = 2.1081851067789197;  // g sqrt(2 - Omega^2/(8 g^4)) at the default point
}

TEST_CASE("parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    SUBCASE("omega is the unit scale") {
        p.omega = 2.0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("negative kappa rejected") {
        p.kappa = -0.01;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("negative Omega rejected") {
        p.Omega = -1.0;
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
    SUBCASE("non-finite values rejected") {
        p.g = std::nan("");
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    }
}

TEST_CASE("drive terms") {
    ModelParams p;  // eta0 = 3, omega_c = 1.5, omega_d = 1
    const double s2 = std::sqrt(2.0);
    CHECK(vector_potential(p, 0.0) == 0.0);
    CHECK(drive_x_coupling(p, 0.0) == doctest::Approx(s2 * 3.0).epsilon(1e-14));
    for (const double t : {0.3, 1.7, 4.0}) {
        const double eta = 3.0 * std::cos(1.5 * t);
        CHECK(vector_potential(p, t) == doctest::Approx(s2 * eta * std::sin(t)).epsilon(1e-14));
        CHECK(drive_x_coupling(p, t) == doctest::Approx(s2 * eta * std::cos(t)).epsilon(1e-14));
        // Constant-amplitude mode: same carrier, no modulation envelope.
        CHECK(vector_potential(p, t, DriveMode::constant) ==
              doctest::Approx(s2 * 3.0 * std::sin(t)).epsilon(1e-14));
    }
}

TEST_CASE("adiabatic potential values and double-well structure") {
    ModelParams p;
    p.eta0 = 0.0;
    CHECK(adiabatic_potential(p, 0.0, 0.37, AdiabaticBranch::lower) ==
          doctest::Approx(-0.5).epsilon(1e-14));
    // Direct evaluation at x = 1: x^2/2 - sqrt(Omega^2/4 + 2 g^2 x^2).
    CHECK(adiabatic_potential(p, 1.0, 0.0, AdiabaticBranch::lower) ==
          doctest::Approx(0.5 - std::sqrt(0.25 + 4.5)).epsilon(1e-12));

    // g > sqrt(Omega)/2: symmetric wells strictly below the x = 0 saddle.
    const double v0 = adiabatic_potential(p, 0.0, 0.0, AdiabaticBranch::lower);
    const double vr = adiabatic_potential(p, kXss, 0.0, AdiabaticBranch::lower);
    const double vl = adiabatic_potential(p, -kXss, 0.0, AdiabaticBranch::lower);
    CHECK(vr < v0);
    CHECK(vl == doctest::Approx(vr).epsilon(1e-14));
}

TEST_CASE("branch gap never closes") {
    ModelParams p;
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        const double up = adiabatic_potential(p, x, 0.9, AdiabaticBranch::upper);
        const double lo = adiabatic_potential(p, x, 0.9, AdiabaticBranch::lower);
        CHECK(up - lo == doctest::Approx(adiabatic_gap(p, x)).epsilon(1e-12));
        CHECK(up - lo >= p.Omega - 1e-12);
    }
}

TEST_CASE("fixed points across the pitchfork bifurcation") {
    ModelParams p;
    SUBCASE("below threshold: only the stable origin") {
        p.g = 0.4;
        const auto fps = fixed_points(p);
        REQUIRE(fps.size() == 1);
        CHECK(fps[0].x == 0.0);
        CHECK(fps[0].stable);
        CHECK_THROWS_AS(steady_state_displacement(p), std::domain_error);
    }
    SUBCASE("at threshold: degenerate, still only the origin") {
        p.g = 0.5;  // 4 g^2 = Omega exactly
        const auto fps = fixed_points(p);
        REQUIRE(fps.size() == 1);
        CHECK(fps[0].stable);
    }
    SUBCASE("above threshold: unstable origin plus the symmetric pair") {
        const auto fps = fixed_points(p);  // g = 1.5
        REQUIRE(fps.size() == 3);
        CHECK(fps[0].x == 0.0);
        CHECK_FALSE(fps[0].stable);
        CHECK(fps[1].x == doctest::Approx(-kXss).epsilon(1e-12));
        CHECK(fps[2].x == doctest::Approx(+kXss).epsilon(1e-12));
        CHECK(fps[1].stable);
        CHECK(fps[2].stable);
        CHECK(steady_state_displacement(p) == doctest::Approx(2.10819).epsilon(1e-5));
    }
}

TEST_CASE("mean-field drift vanishes at every fixed point") {
    ModelParams p;
    p.eta0 = 0.0;
    for (const auto& fp : fixed_points(p)) {
        const auto q = lower_adiabatic_qubit_state(p, fp.x);
        const auto b = bloch_vector(q);
        SemiclassicalState s{fp.x, 0.0, b[0], b[1], b[2]};
        const SemiclassicalState d = eom_derivative(p, s, 0.0);
        CHECK(std::abs(d.x) < 1e-10);
        CHECK(std::abs(d.p) < 1e-10);
        CHECK(std::abs(d.u) < 1e-10);
        CHECK(std::abs(d.v) < 1e-10);
        CHECK(std::abs(d.Z) < 1e-10);
    }
}

TEST_CASE("lower adiabatic qubit state") {
    ModelParams p;
    SUBCASE("x = 0 is the bare ground state") {
        const auto q = lower_adiabatic_qubit_state(p, 0.0);
        CHECK(q[0] == 0.0);
        CHECK(q[1] == 1.0);
    }
    SUBCASE("large-x limit approaches the sigma_x eigenvector") {
        const auto q = lower_adiabatic_qubit_state(p, 1e8);
        CHECK(q[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-7));
        CHECK(q[1] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-7));
    }
    SUBCASE("matches a dense symmetric eigensolve on a grid of x") {
        for (double x = -4.0; x <= 4.0; x += 0.53) {
            const auto q = lower_adiabatic_qubit_state(p, x);
            CHECK(std::abs(q[0] * q[0] + q[1] * q[1] - 1.0) <= 1e-14);
            Eigen::Matrix2d h;
            const double b = std::sqrt(2.0) * p.g * x;
            h << 0.5 * p.Omega, b, b, -0.5 * p.Omega;
            Eigen::Vector2d vec(q[0], q[1]);
            const double lam = -std::sqrt(0.25 * p.Omega * p.Omega + 2.0 * p.g * p.g * x * x);
            CHECK((h * vec - lam * vec).norm() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
            Eigen::Vector2d ground = es.eigenvectors().col(0);  // ascending eigenvalues
            if ((ground(0) != 0.0 ? ground(0) : ground(1)) < 0) ground = -ground;
            CHECK((vec - ground).norm() < 1e-12);
        }
    }
    SUBCASE("Bloch vector in the right well (frozen values)") {
        const auto b = bloch_vector(lower_adiabatic_qubit_state(p, kXss));
        CHECK(b[0] == doctest::Approx(-0.9938079899999066).epsilon(1e-12));
        CHECK(b[1] == 0.0);
        CHECK(b[2] == doctest::Approx(-1.0 / 9.0).epsilon(1e-12));
    }
}

TEST_CASE("params JSON round-trip and strictness") {
    ModelParams p;
    p.g = 0.77;
    p.kappa = 0.005;
    nlohmann::json j;
    to_json(j, p);
    ModelParams q;
    from_json(j, q);
    CHECK(p == q);

    SUBCASE("unknown keys rejected") {
        j["coupling"] = 1.0;
        CHECK_THROWS_AS(from_json(j, q), std::invalid_argument);
    }
    SUBCASE("omitted keys take defaults") {
        const nlohmann::json partial = {{"g", 0.9}};
        from_json(partial, q);
        CHECK(q.g == 0.9);
        CHECK(q.eta0 == 3.0);
        CHECK(q.omega_c == 1.5);
    }
    SUBCASE("invalid values rejected on load") {
        const nlohmann::json bad = {{"omega", 2.0}};
        CHECK_THROWS_AS(from_json(bad, q), std::invalid_argument);
    }
}
