#include "qchaos/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qchaos {

double BipartiteDensityMatrix::trace_real() const { return entries.trace().real(); }

double BipartiteDensityMatrix::hermiticity_error() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

double BipartiteDensityMatrix::min_eigenvalue() const {
    Eigen::MatrixXcd sym = 0.5 * (entries + entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void BipartiteDensityMatrix::check_invariants(double herm_tol, double trace_tol,
                                              double eig_floor) const {
    if (entries.rows() != dim() || entries.cols() != dim())
        throw std::runtime_error("BipartiteDensityMatrix: entries dimension does not match n_max");
    const double he = hermiticity_error();
    if (!(he <= herm_tol))
        throw std::runtime_error("BipartiteDensityMatrix: Hermiticity error " + std::to_string(he));
    const double te = std::abs(trace_real() - 1.0);
    if (!(te <= trace_tol))
        throw std::runtime_error("BipartiteDensityMatrix: trace error " + std::to_string(te));
    const double lo = min_eigenvalue();
    if (!(lo >= eig_floor))
        throw std::runtime_error("BipartiteDensityMatrix: negative eigenvalue " + std::to_string(lo));
}

Eigen::MatrixXd hermite_basis(const QuadratureGrid& grid, int n_max) {
    grid.validate();
    if (n_max < 0) throw std::invalid_argument("hermite_basis: n_max must be >= 0");
    const int n = grid.n_points;
    Eigen::MatrixXd basis(n_max + 1, n);
    const double norm0 = std::pow(M_PI, -0.25);
    for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        basis(0, j) = norm0 * std::exp(-0.5 * x * x);
        if (n_max >= 1) basis(1, j) = std::sqrt(2.0) * x * basis(0, j);
        for (int m = 1; m < n_max; ++m) {
            basis(m + 1, j) = std::sqrt(2.0 / (m + 1)) * x * basis(m, j) -
                              std::sqrt(static_cast<double>(m) / (m + 1)) * basis(m - 1, j);
        }
    }
    return basis;
}

FockProjection project_to_fock(const SpinorState& state, int n_max, double leakage_tolerance) {
    if (!(state.grid.dx() * std::sqrt(2.0 * n_max + 1.0) < 1.0))
        throw std::invalid_argument(
            "project_to_fock: grid too coarse for requested cutoff (need dx*sqrt(2n+1) < 1)");
    return project_to_fock(state, hermite_basis(state.grid, n_max), leakage_tolerance);
}

FockProjection project_to_fock(const SpinorState& state, const Eigen::MatrixXd& basis,
                               double leakage_tolerance) {
    const int n = state.grid.n_points;
    if (basis.cols() != n)
        throw std::invalid_argument("project_to_fock: basis grid size mismatch");
    const int n_max = static_cast<int>(basis.rows()) - 1;
    if (!(state.grid.dx() * std::sqrt(2.0 * n_max + 1.0) < 1.0))
        throw std::invalid_argument(
            "project_to_fock: grid too coarse for requested cutoff (need dx*sqrt(2n+1) < 1)");

    FockProjection proj;
    proj.n_max = n_max;
    proj.t = state.t;
    proj.coefficients.resize(2 * (n_max + 1));
    const double dx = state.grid.dx();
    Eigen::Map<const Eigen::VectorXcd> up(state.up.data(), n);
    Eigen::Map<const Eigen::VectorXcd> down(state.down.data(), n);
    const auto project = [&](const Eigen::Map<const Eigen::VectorXcd>& psi, int offset) {
        Eigen::VectorXd re = basis * psi.real().matrix();
        Eigen::VectorXd im = basis * psi.imag().matrix();
        for (int k = 0; k <= n_max; ++k)
            proj.coefficients(offset + k) = dx * std::complex<double>(re(k), im(k));
    };
    project(up, 0);
    project(down, n_max + 1);
    proj.leakage = 1.0 - proj.coefficients.squaredNorm();
    if (!(proj.leakage < leakage_tolerance))
        throw std::runtime_error("project_to_fock: cutoff leakage " + std::to_string(proj.leakage) +
                                 " exceeds tolerance " + std::to_string(leakage_tolerance) +
                                 "; raise n_max");
    return proj;
}

BipartiteDensityMatrix accumulate_density(const std::vector<FockProjection>& projections) {
    if (projections.empty())
        throw std::invalid_argument("accumulate_density: empty projection list");
    const int n_max = projections.front().n_max;
    const double t = projections.front().t;
    const int d = 2 * (n_max + 1);
    BipartiteDensityMatrix rho;
    rho.n_max = n_max;
    rho.t = t;
    rho.n_trajectories_accumulated = static_cast<int>(projections.size());
    rho.entries = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& p : projections) {
        if (p.n_max != n_max)
            throw std::invalid_argument("accumulate_density: mixed Fock cutoffs");
        if (std::abs(p.t - t) > 1e-9)
            throw std::invalid_argument("accumulate_density: mixed snapshot times");
        rho.entries.noalias() += p.coefficients * p.coefficients.adjoint();
    }
    rho.entries /= static_cast<double>(projections.size());
    return rho;
}

double negativity(const BipartiteDensityMatrix& rho) {
    const int m = rho.n_max + 1;
    const int d = 2 * m;
    if (rho.entries.rows() != d || rho.entries.cols() != d)
        throw std::invalid_argument("negativity: dimension mismatch");
    Eigen::MatrixXcd pt(d, d);
    // Partial transpose on the qubit: swap the off-diagonal qubit blocks.
    pt.block(0, 0, m, m) = rho.entries.block(0, 0, m, m);
    pt.block(m, m, m, m) = rho.entries.block(m, m, m, m);
    pt.block(0, m, m, m) = rho.entries.block(m, 0, m, m);
    pt.block(m, 0, m, m) = rho.entries.block(0, m, m, m);
    Eigen::MatrixXcd sym = 0.5 * (pt + pt.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
    double sum_negative = 0.0;
    for (int i = 0; i < d; ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam < 0.0) sum_negative += lam;
    }
    return sum_negative;
}

double purity(const BipartiteDensityMatrix& rho) {
    return (rho.entries * rho.entries).trace().real();
}

namespace {

PhotonStatistics stats_from_moments(double mean_n, double mean_n2) {
    PhotonStatistics s;
    s.mean_n = mean_n;
    s.delta_n = std::sqrt(std::max(0.0, mean_n2 - mean_n * mean_n));
    if (mean_n < 1e-6)
        throw std::domain_error("photon_statistics: mean photon number " + std::to_string(mean_n) +
                                " too small for a scaled variance");
    s.scaled_variance = s.delta_n / mean_n;
    return s;
}

}  // namespace

QuadratureMoments quadrature_moments(const BipartiteDensityMatrix& rho) {
    // x couples n <-> n+1 with element sqrt((n+1)/2); p has +/- i times the
    // same element; x^2 and p^2 are n + 1/2 on the diagonal and
    // +/- sqrt((n+1)(n+2))/2 on the n <-> n+2 band.
    const int m = rho.n_max + 1;
    auto cx = [](int n) { return std::sqrt(0.5 * (n + 1)); };
    QuadratureMoments q;
    for (int s = 0; s < 2; ++s) {
        const int off = s * m;
        for (int n = 0; n < m; ++n) {
            const double pop = rho.entries(off + n, off + n).real();
            q.mean_x2 += pop * (n + 0.5);
            q.mean_p2 += pop * (n + 0.5);
            if (n + 1 < m) {
                const std::complex<double> z = rho.entries(off + n, off + n + 1);
                q.mean_x += 2.0 * cx(n) * z.real();
                q.mean_p -= 2.0 * cx(n) * z.imag();
            }
            if (n + 2 < m) {
                const double band = 2.0 * cx(n) * cx(n + 1) *
                                    rho.entries(off + n, off + n + 2).real();
                q.mean_x2 += band;
                q.mean_p2 -= band;
            }
        }
    }
    return q;
}

PhotonStatistics photon_statistics(const BipartiteDensityMatrix& rho) {
    const int m = rho.n_max + 1;
    double mean_n = 0.0, mean_n2 = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (int n = 0; n < m; ++n) {
            const double pop = rho.entries(s * m + n, s * m + n).real();
            mean_n += pop * n;
            mean_n2 += pop * static_cast<double>(n) * n;
        }
    }
    return stats_from_moments(mean_n, mean_n2);
}

PhotonStatistics photon_statistics(const std::vector<FockProjection>& ensemble) {
    if (ensemble.empty())
        throw std::invalid_argument("photon_statistics: empty ensemble");
    const int m = ensemble.front().n_max + 1;
    double mean_n = 0.0, mean_n2 = 0.0;
    for (const auto& p : ensemble) {
        if (p.n_max + 1 != m)
            throw std::invalid_argument("photon_statistics: mixed Fock cutoffs");
        for (int s = 0; s < 2; ++s) {
            for (int n = 0; n < m; ++n) {
                const double pop = std::norm(p.coefficients(s * m + n));
                mean_n += pop * n;
                mean_n2 += pop * static_cast<double>(n) * n;
            }
        }
    }
    mean_n /= static_cast<double>(ensemble.size());
    mean_n2 /= static_cast<double>(ensemble.size());
    return stats_from_moments(mean_n, mean_n2);
}

double sigma_z_expectation(const SpinorState& state) { return state.sigma_z(); }

double sigma_z_expectation(const BipartiteDensityMatrix& rho) {
    const int m = rho.n_max + 1;
    double up = 0.0, down = 0.0;
    for (int n = 0; n < m; ++n) {
        up += rho.entries(n, n).real();
        down += rho.entries(m + n, m + n).real();
    }
    return up - down;
}

}  // namespace qchaos
