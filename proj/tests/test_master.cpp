#include <doctest.h>

#include <cmath>
#include <complex>

#include "qchaos/master.hpp"
#include "qchaos/quantum.hpp"

using namespace qchaos;

namespace {

// |alpha> x |qubit s> as a rank-one density matrix (s = 1 is the bare ground
// state).
BipartiteDensityMatrix coherent_density(int n_max, double alpha, int s_block) {
    const int d = 2 * (n_max + 1);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
    double c = std::exp(-0.5 * alpha * alpha);
    for (int n = 0; n <= n_max; ++n) {
        psi(s_block * (n_max + 1) + n) = c;
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    psi.normalize();
    BipartiteDensityMatrix rho;
    rho.n_max = n_max;
    rho.t = 0.0;
    rho.n_trajectories_accumulated = 1;
    rho.entries = psi * psi.adjoint();
    return rho;
}

}  // namespace

TEST_CASE("free oscillator: coherent state rotates classically") {
    ModelParams p;
    p.g = 0.0;
    p.eta0 = 0.0;
    p.kappa = 0.0;
    const double x0 = 1.5;
    const BipartiteDensityMatrix rho0 = coherent_density(20, x0 / std::sqrt(2.0), 1);

    const auto samples = direct_lindblad_oracle(p, 20, rho0, 6.0, 0.25, DriveMode::modulated, 1e-10);
    REQUIRE(samples.size() == 25);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double t = samples[k].t;
        CHECK(t == doctest::Approx(0.25 * k).epsilon(1e-12));
        const QuadratureMoments m = quadrature_moments(samples[k]);
        CHECK(std::abs(m.mean_x - x0 * std::cos(t)) < 1e-7);
        CHECK(std::abs(m.mean_p - (-x0 * std::sin(t))) < 1e-7);
        const double vx = m.mean_x2 - m.mean_x * m.mean_x;
        const double vp = m.mean_p2 - m.mean_p * m.mean_p;
        CHECK(vx == doctest::Approx(0.5).epsilon(1e-7));
        CHECK(vp == doctest::Approx(0.5).epsilon(1e-7));
    }
}

TEST_CASE("pure position-coupled dissipation heats <p^2> at rate 2 kappa") {
    // With the oscillator and coupling switched off the only field dynamics is
    // the measurement back-action, whose Ehrenfest rate is state-independent.
    ModelParams p;
    p.omega = 0.0;
    p.g = 0.0;
    p.eta0 = 0.0;
    p.kappa = 0.05;
    BipartiteDensityMatrix rho0 = coherent_density(20, 0.0, 1);  // vacuum

    const auto samples = direct_lindblad_oracle(p, 20, rho0, 1.0, 0.25, DriveMode::modulated, 1e-10);
    REQUIRE(samples.size() == 5);
    for (const auto& rho : samples) {
        const QuadratureMoments m = quadrature_moments(rho);
        CHECK(std::abs(m.mean_p2 - (0.5 + 2.0 * p.kappa * rho.t)) < 1e-7);
        CHECK(std::abs(m.mean_x2 - 0.5) < 1e-8);
        CHECK(std::abs(m.mean_x) < 1e-9);
        CHECK(std::abs(m.mean_p) < 1e-9);
    }
    const PhotonStatistics stats = photon_statistics(samples.back());
    CHECK(stats.mean_n == doctest::Approx(p.kappa * 1.0).epsilon(1e-6));
}

TEST_CASE("driven dissipative run keeps the density matrix physical") {
    ModelParams p;
    p.kappa = 0.01;
    const QuadratureGrid grid(1024, -20.0, 20.0);
    const FockProjection proj = project_to_fock(build_initial_state(p, grid), 100);
    const BipartiteDensityMatrix rho0 = accumulate_density({proj});

    OracleDiagnostics diag;
    const auto samples =
        direct_lindblad_oracle(p, 100, rho0, 1.0, 0.25, DriveMode::modulated, 1e-8, &diag);
    CHECK(diag.max_trace_error <= 1e-9);
    CHECK(diag.max_hermiticity_error <= 1e-10);
    CHECK(diag.min_eigenvalue >= -1e-8);
    CHECK(diag.max_cutoff_population < 1e-4);
    CHECK(diag.rhs_evaluations > 0);
    CHECK_NOTHROW(samples.back().check_invariants());
    CHECK(samples.back().t == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unitary limit preserves purity") {
    ModelParams p;
    p.kappa = 0.0;
    const QuadratureGrid grid(1024, -20.0, 20.0);
    const FockProjection proj = project_to_fock(build_initial_state(p, grid), 100);
    const BipartiteDensityMatrix rho0 = accumulate_density({proj});

    const auto samples = direct_lindblad_oracle(p, 100, rho0, 1.0, 0.5, DriveMode::modulated, 1e-9);
    CHECK(purity(samples.front()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(purity(samples.back()) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("argument validation") {
    ModelParams p;
    const BipartiteDensityMatrix rho0 = coherent_density(20, 0.0, 1);
    SUBCASE("dt must divide t_final") {
        CHECK_THROWS_AS(
            (void)direct_lindblad_oracle(p, 20, rho0, 1.0, 0.3), std::invalid_argument);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(
            (void)direct_lindblad_oracle(p, 30, rho0, 1.0, 0.5), std::invalid_argument);
    }
    SUBCASE("initial state must sit well below the cutoff") {
        const BipartiteDensityMatrix big = coherent_density(10, 3.0, 1);
        CHECK_THROWS_AS(
            (void)direct_lindblad_oracle(p, 10, big, 1.0, 0.5), std::invalid_argument);
    }
}

TEST_CASE("runaway cutoff leakage is detected during the run") {
    ModelParams p;
    p.kappa = 0.01;
    // The driven packet explores photon numbers far above this cutoff; the
    // leakage monitor must abort rather than return a truncated lie.
    const BipartiteDensityMatrix rho0 = coherent_density(26, 2.1081851067789197 / std::sqrt(2.0), 1);
    CHECK_THROWS_AS((void)direct_lindblad_oracle(p, 26, rho0, 5.0, 0.25), std::runtime_error);
}
