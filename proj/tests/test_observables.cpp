#include <doctest.h>

#include <cmath>
#include <complex>

#include "qchaos/observables.hpp"

using namespace qchaos;
using namespace std::complex_literals;

namespace {
const double kXss = 2.1081851067789197;

SpinorState packet(const QuadratureGrid& grid, double x0, double p0 = 0.0) {
    SpinorState s;
    s.grid = grid;
    s.up.resize(grid.n_points);
    s.down = Eigen::ArrayXcd::Zero(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        s.up(j) = std::pow(M_PI, -0.25) * std::exp(-0.5 * (x - x0) * (x - x0)) *
                  std::exp(1i * p0 * x);
    }
    s.normalize();
    return s;
}

BipartiteDensityMatrix pure_density(int n_max, const Eigen::VectorXcd& psi) {
    BipartiteDensityMatrix rho;
    rho.n_max = n_max;
    rho.n_trajectories_accumulated = 1;
    rho.entries = psi * psi.adjoint();
    rho.entries /= rho.entries.trace().real();
    return rho;
}
}  // namespace

TEST_CASE("hermite basis is orthonormal under grid quadrature") {
    const QuadratureGrid grid(1024, -20.0, 20.0);
    const Eigen::MatrixXd basis = hermite_basis(grid, 30);
    REQUIRE(basis.rows() == 31);
    REQUIRE(basis.cols() == grid.n_points);
    const Eigen::MatrixXd gram = basis * basis.transpose() * grid.dx();
    CHECK((gram - Eigen::MatrixXd::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("projection of canonical states") {
    const QuadratureGrid grid(1024, -20.0, 20.0);

    SUBCASE("vacuum maps to c_0 = 1") {
        const FockProjection f = project_to_fock(packet(grid, 0.0), 10);
        CHECK(std::abs(f.coefficients(0) - 1.0) < 1e-10);
        CHECK(f.coefficients.tail(21).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(f.leakage < 1e-10);
    }
    SUBCASE("displaced packet has Poisson populations") {
        const double x0 = kXss;
        const double na = 0.5 * x0 * x0;  // |alpha|^2
        const FockProjection f = project_to_fock(packet(grid, x0), 60);
        CHECK(f.leakage < 1e-10);
        double pop = std::exp(-na);
        for (int n = 0; n <= 8; ++n) {
            CHECK(std::norm(f.coefficients(n)) == doctest::Approx(pop).epsilon(1e-8));
            pop *= na / (n + 1);
        }
    }
    SUBCASE("kicked packet carries momentum into the coefficients") {
        const FockProjection f = project_to_fock(packet(grid, 1.5, 0.8), 40);
        const BipartiteDensityMatrix rho = accumulate_density({f});
        const QuadratureMoments m = quadrature_moments(rho);
        CHECK(m.mean_x == doctest::Approx(1.5).epsilon(1e-8));
        CHECK(m.mean_p == doctest::Approx(0.8).epsilon(1e-8));
        CHECK(m.mean_x2 - m.mean_x * m.mean_x == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(m.mean_p2 - m.mean_p * m.mean_p == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("coarse grids cannot resolve the top basis function") {
        const QuadratureGrid coarse(256, -20.0, 20.0);
        CHECK_THROWS_AS((void)project_to_fock(packet(coarse, 0.0), 60), std::invalid_argument);
    }
    SUBCASE("truncation loss above tolerance is an error") {
        CHECK_THROWS((void)project_to_fock(packet(grid, 4.0), 10));
        CHECK_NOTHROW((void)project_to_fock(packet(grid, 4.0), 10, 0.5));
    }
}

TEST_CASE("density accumulation") {
    const QuadratureGrid grid(1024, -20.0, 20.0);
    FockProjection a = project_to_fock(packet(grid, 1.0), 30);
    FockProjection b = project_to_fock(packet(grid, -1.0), 30);

    const BipartiteDensityMatrix rho = accumulate_density({a, b});
    CHECK(rho.n_trajectories_accumulated == 2);
    CHECK(rho.trace_real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rho.hermiticity_error() < 1e-14);
    CHECK_NOTHROW(rho.check_invariants());
    CHECK(quadrature_moments(rho).mean_x == doctest::Approx(0.0).epsilon(1e-9));

    FockProjection c = project_to_fock(packet(grid, 0.0), 20);
    CHECK_THROWS((void)accumulate_density({a, c}));  // mismatched cutoffs
    FockProjection d = a;
    d.t = 3.0;
    CHECK_THROWS((void)accumulate_density({a, d}));  // mismatched times
    CHECK_THROWS((void)accumulate_density({}));
}

TEST_CASE("negativity") {
    const int n_max = 6;
    const int d = 2 * (n_max + 1);

    SUBCASE("product states carry none") {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
        psi(0) = std::sqrt(0.3);       // |2> x |0>
        psi(n_max + 1) = std::sqrt(0.7);  // |1> x |0>  (same field state)
        const BipartiteDensityMatrix rho = pure_density(n_max, psi);
        CHECK(std::abs(negativity(rho)) < 1e-10);
    }
    SUBCASE("maximally entangled qubit-field pair gives -1/2") {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
        psi(0) = 1.0 / std::sqrt(2.0);            // |2> x |0>
        psi(n_max + 1 + 1) = 1.0 / std::sqrt(2.0);  // |1> x |1>
        const BipartiteDensityMatrix rho = pure_density(n_max, psi);
        CHECK(negativity(rho) == doctest::Approx(-0.5).epsilon(1e-10));
    }
    SUBCASE("invariant under local qubit rotations") {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
        psi(0) = std::sqrt(0.4);
        psi(n_max + 1 + 1) = std::sqrt(0.6) * std::exp(0.7i);
        const BipartiteDensityMatrix rho = pure_density(n_max, psi);
        const double base = negativity(rho);

        const double th = 0.613;
        Eigen::Matrix2cd u2;
        u2 << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
        for (int s = 0; s < 2; ++s)
            for (int r = 0; r < 2; ++r)
                u.block(s * (n_max + 1), r * (n_max + 1), n_max + 1, n_max + 1) =
                    u2(s, r) * Eigen::MatrixXcd::Identity(n_max + 1, n_max + 1);
        BipartiteDensityMatrix rot = rho;
        rot.entries = u * rho.entries * u.adjoint();
        CHECK(negativity(rot) == doctest::Approx(base).epsilon(1e-9));
        CHECK(base < -0.1);
    }
}

TEST_CASE("purity") {
    const int n_max = 4;
    const int d = 2 * (n_max + 1);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
    psi(2) = 1.0;
    const BipartiteDensityMatrix pure = pure_density(n_max, psi);
    CHECK(purity(pure) == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(d);
    phi(7) = 1.0;
    BipartiteDensityMatrix mix = pure;
    mix.entries = 0.5 * pure.entries + 0.5 * (phi * phi.adjoint());
    CHECK(purity(mix) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("photon statistics") {
    const int n_max = 30;
    const int d = 2 * (n_max + 1);

    SUBCASE("Fock state: sharp photon number") {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
        psi(n_max + 1 + 3) = 1.0;  // |1> x |3>
        const PhotonStatistics s = photon_statistics(pure_density(n_max, psi));
        CHECK(s.mean_n == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(std::abs(s.delta_n) < 1e-6);
    }
    SUBCASE("coherent state: delta_n = sqrt(mean_n)") {
        const QuadratureGrid grid(1024, -20.0, 20.0);
        const FockProjection f = project_to_fock(packet(grid, kXss), 60);
        const PhotonStatistics s = photon_statistics(std::vector<FockProjection>{f});
        const double na = 0.5 * kXss * kXss;
        CHECK(s.mean_n == doctest::Approx(na).epsilon(1e-6));
        CHECK(s.delta_n == doctest::Approx(std::sqrt(na)).epsilon(1e-6));
        CHECK(s.scaled_variance == doctest::Approx(s.delta_n / s.mean_n).epsilon(1e-12));
    }
    SUBCASE("vacuum has no meaningful scaled variance") {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
        psi(0) = 1.0;
        CHECK_THROWS_AS((void)photon_statistics(pure_density(n_max, psi)), std::domain_error);
    }
}

TEST_CASE("qubit inversion agrees between grid and Fock representations") {
    const ModelParams p;
    const QuadratureGrid grid(1024, -20.0, 20.0);
    const SpinorState state = build_initial_state(p, grid);
    const FockProjection f = project_to_fock(state, 80);
    const BipartiteDensityMatrix rho = accumulate_density({f});

    CHECK(sigma_z_expectation(state) == doctest::Approx(state.sigma_z()).epsilon(1e-12));
    CHECK(sigma_z_expectation(rho) == doctest::Approx(state.sigma_z()).epsilon(1e-8));
    const QuadratureMoments m = quadrature_moments(rho);
    CHECK(m.mean_x == doctest::Approx(state.mean_x()).epsilon(1e-6));
    CHECK(m.mean_x2 == doctest::Approx(state.mean_x2()).epsilon(1e-6));
}

TEST_CASE("density-matrix invariant checks catch corruption") {
    const int n_max = 4;
    const int d = 2 * (n_max + 1);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
    psi(0) = 1.0;
    const BipartiteDensityMatrix good = pure_density(n_max, psi);

    BipartiteDensityMatrix bad_trace = good;
    bad_trace.entries *= 0.9;
    CHECK_THROWS_AS(bad_trace.check_invariants(), std::runtime_error);

    BipartiteDensityMatrix bad_herm = good;
    bad_herm.entries(0, 1) = 0.1;
    bad_herm.entries(1, 0) = -0.1;
    CHECK_THROWS_AS(bad_herm.check_invariants(), std::runtime_error);

    BipartiteDensityMatrix bad_eig = good;
    bad_eig.entries(1, 1) = -0.2;
    bad_eig.entries(0, 0) = 1.2;
    CHECK_THROWS_AS(bad_eig.check_invariants(), std::runtime_error);
}
