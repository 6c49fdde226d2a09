#include "qchaos/master.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "qchaos/integrate.hpp"

namespace qchaos {

namespace {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/* Right-hand side of the master equation.  All Hamiltonian pieces are at most
 * tridiagonal in the Fock index and 2x2 in the qubit index, so every product
 * is applied structurally in O(d^2) instead of forming dense operator
 * matrices (d = 2(n_max+1)). */
struct LindbladRhs {
    ModelParams p;
    DriveMode mode;
    int M;                 // n_max + 1
    Eigen::VectorXd cx;    // ladder couplings: cx(n) = sqrt((n+1)/2) links n <-> n+1
    Eigen::VectorXd hdiag; // omega*n + (Omega/2)*(+1 for qubit block 0, -1 for block 1)
    mutable Mat hr, rh, t1, t2;
    mutable long long evals = 0;

    LindbladRhs(const ModelParams& params, int n_max, DriveMode m)
        : p(params), mode(m), M(n_max + 1) {
        cx.resize(std::max(M - 1, 0));
        for (int n = 0; n + 1 < M; ++n) cx(n) = std::sqrt(0.5 * (n + 1));
        hdiag.resize(2 * M);
        for (int s = 0; s < 2; ++s)
            for (int n = 0; n < M; ++n)
                hdiag(s * M + n) = p.omega * n + 0.5 * p.Omega * (s == 0 ? 1.0 : -1.0);
        hr.resize(2 * M, 2 * M);
        rh.resize(2 * M, 2 * M);
        t1.resize(2 * M, 2 * M);
        t2.resize(2 * M, 2 * M);
    }

    // out += coef * (x ⊗ 1) in
    void add_x_left(const Mat& in, Mat& out, Cx coef) const {
        for (int s = 0; s < 2; ++s) {
            const int o = s * M;
            for (int n = 0; n < M; ++n) {
                if (n > 0) out.row(o + n).noalias() += (coef * cx(n - 1)) * in.row(o + n - 1);
                if (n + 1 < M) out.row(o + n).noalias() += (coef * cx(n)) * in.row(o + n + 1);
            }
        }
    }

    // out += coef * in (x ⊗ 1)
    void add_x_right(const Mat& in, Mat& out, Cx coef) const {
        for (int s = 0; s < 2; ++s) {
            const int o = s * M;
            for (int n = 0; n < M; ++n) {
                if (n > 0) out.col(o + n).noalias() += (coef * cx(n - 1)) * in.col(o + n - 1);
                if (n + 1 < M) out.col(o + n).noalias() += (coef * cx(n)) * in.col(o + n + 1);
            }
        }
    }

    // out += coef * (p ⊗ 1) in, with p_{n+1,n} = i cx(n), p_{n,n+1} = -i cx(n)
    void add_p_left(const Mat& in, Mat& out, Cx coef) const {
        const Cx ic = coef * Cx(0.0, 1.0);
        for (int s = 0; s < 2; ++s) {
            const int o = s * M;
            for (int n = 0; n < M; ++n) {
                if (n > 0) out.row(o + n).noalias() += (ic * cx(n - 1)) * in.row(o + n - 1);
                if (n + 1 < M) out.row(o + n).noalias() -= (ic * cx(n)) * in.row(o + n + 1);
            }
        }
    }

    // out += coef * in (p ⊗ 1)
    void add_p_right(const Mat& in, Mat& out, Cx coef) const {
        const Cx ic = coef * Cx(0.0, 1.0);
        for (int s = 0; s < 2; ++s) {
            const int o = s * M;
            for (int n = 0; n < M; ++n) {
                if (n + 1 < M) out.col(o + n).noalias() += (ic * cx(n)) * in.col(o + n + 1);
                if (n > 0) out.col(o + n).noalias() -= (ic * cx(n - 1)) * in.col(o + n - 1);
            }
        }
    }

    // out += coef * (x ⊗ sigma_x) in: rows draw from the opposite qubit block.
    void add_xsx_left(const Mat& in, Mat& out, Cx coef) const {
        for (int s = 0; s < 2; ++s) {
            const int o = s * M, q = (1 - s) * M;
            for (int n = 0; n < M; ++n) {
                if (n > 0) out.row(o + n).noalias() += (coef * cx(n - 1)) * in.row(q + n - 1);
                if (n + 1 < M) out.row(o + n).noalias() += (coef * cx(n)) * in.row(q + n + 1);
            }
        }
    }

    void add_xsx_right(const Mat& in, Mat& out, Cx coef) const {
        for (int s = 0; s < 2; ++s) {
            const int o = s * M, q = (1 - s) * M;
            for (int n = 0; n < M; ++n) {
                if (n > 0) out.col(o + n).noalias() += (coef * cx(n - 1)) * in.col(q + n - 1);
                if (n + 1 < M) out.col(o + n).noalias() += (coef * cx(n)) * in.col(q + n + 1);
            }
        }
    }

    void operator()(double t, const Mat& rho, Mat& drho) const {
        ++evals;
        const double f = drive_x_coupling(p, t, mode);
        const double A = vector_potential(p, t, mode);
        const double sg = std::sqrt(2.0) * p.g;

        for (int i = 0; i < 2 * M; ++i) hr.row(i) = hdiag(i) * rho.row(i);
        add_x_left(rho, hr, f);
        add_p_left(rho, hr, A);
        add_xsx_left(rho, hr, sg);

        for (int i = 0; i < 2 * M; ++i) rh.col(i) = hdiag(i) * rho.col(i);
        add_x_right(rho, rh, f);
        add_p_right(rho, rh, A);
        add_xsx_right(rho, rh, sg);

        drho = Cx(0.0, 1.0) * (rh - hr);

        if (p.kappa > 0.0) {
            t1.setZero();
            add_x_left(rho, t1, 1.0);          // t1 = x rho
            add_x_right(t1, drho, 2.0 * p.kappa);  // + 2k x rho x
            add_x_left(t1, drho, -p.kappa);        // - k x^2 rho
            t2.setZero();
            add_x_right(rho, t2, 1.0);         // t2 = rho x
            add_x_right(t2, drho, -p.kappa);       // - k rho x^2
        }
    }
};

double top_levels_population(const Mat& rho, int M) {
    double pop = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = std::max(0, M - 2); n < M; ++n) pop += rho(s * M + n, s * M + n).real();
    return pop;
}

}  // namespace

std::vector<BipartiteDensityMatrix> direct_lindblad_oracle(
    const ModelParams& params, int n_max, const BipartiteDensityMatrix& rho0, double t_final,
    double dt, DriveMode mode, double tol, OracleDiagnostics* diagnostics) {
    if (n_max < 1) throw std::invalid_argument("direct_lindblad_oracle: n_max must be >= 1");
    if (!(params.kappa >= 0.0))
        throw std::invalid_argument("direct_lindblad_oracle: kappa must be >= 0");
    if (!(t_final > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("direct_lindblad_oracle: t_final and dt must be positive");
    const double nr = t_final / dt;
    if (std::abs(nr - std::round(nr)) > 1e-9 * std::max(1.0, nr))
        throw std::invalid_argument("direct_lindblad_oracle: dt must divide t_final");
    const int d = 2 * (n_max + 1);
    if (rho0.n_max != n_max || rho0.entries.rows() != d || rho0.entries.cols() != d)
        throw std::invalid_argument("direct_lindblad_oracle: rho0 dimension mismatch");
    const double pop0 = top_levels_population(rho0.entries, n_max + 1);
    if (!(pop0 < 1e-8))
        throw std::invalid_argument(
            "direct_lindblad_oracle: initial state not supported below the cutoff (top-level "
            "population " + std::to_string(pop0) + ")");

    const auto n_samples = static_cast<std::size_t>(std::llround(nr));
    std::vector<double> times(n_samples + 1);
    for (std::size_t k = 0; k <= n_samples; ++k) times[k] = dt * static_cast<double>(k);

    LindbladRhs rhs(params, n_max, mode);
    Mat y = rho0.entries;
    const double trace0 = y.trace().real();

    OracleDiagnostics dg;
    dg.min_eigenvalue = 1.0;
    std::vector<BipartiteDensityMatrix> series;
    series.reserve(times.size());

    IntegrateOptions opts;
    opts.tol = tol;

    integrate_sampled(
        rhs, y, 0.0, times,
        [&](std::size_t, double t, const Mat& rho) {
            BipartiteDensityMatrix snap;
            snap.n_max = n_max;
            snap.t = t;
            snap.n_trajectories_accumulated = rho0.n_trajectories_accumulated;
            snap.entries = rho;

            const double leak = top_levels_population(rho, n_max + 1);
            dg.max_cutoff_population = std::max(dg.max_cutoff_population, leak);
            if (!(leak < 1e-4))
                throw std::runtime_error("direct_lindblad_oracle: cutoff leakage exceeded (top-level "
                                         "population " + std::to_string(leak) + " at t=" +
                                         std::to_string(t) + "); raise n_max or lower t_final");
            dg.max_trace_error =
                std::max(dg.max_trace_error, std::abs(rho.trace().real() - trace0));
            dg.max_hermiticity_error =
                std::max(dg.max_hermiticity_error, snap.hermiticity_error());
            dg.min_eigenvalue = std::min(dg.min_eigenvalue, snap.min_eigenvalue());

            series.push_back(std::move(snap));
        },
        opts);

    dg.rhs_evaluations = rhs.evals;
    if (diagnostics) *diagnostics = dg;
    return series;
}

}  // namespace qchaos
