#include "qchaos/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qchaos/rng.hpp"

namespace qchaos {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kPi = 3.1415926535897932385;

using CArr = Eigen::ArrayXcd;
using RArr = Eigen::ArrayXd;
using cplx = std::complex<double>;

// out[j] = exp(i*(theta0 + j*dtheta)), refreshed from std::polar every 32
// entries so the modulus cannot drift.
void fill_linear_phase(CArr& out, double theta0, double dtheta) {
    const Eigen::Index n = out.size();
    const cplx r = std::polar(1.0, dtheta);
    cplx cur;
    for (Eigen::Index j = 0; j < n; ++j) {
        if ((j & 31) == 0)
            cur = std::polar(1.0, theta0 + dtheta * static_cast<double>(j));
        out[j] = cur;
        cur *= r;
    }
}
}  // namespace

double SpinorState::norm2() const { return (up.abs2().sum() + down.abs2().sum()) * grid.dx(); }

void SpinorState::normalize() {
    const double n2 = norm2();
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw std::runtime_error("SpinorState::normalize: non-positive or non-finite norm");
    const double s = 1.0 / std::sqrt(n2);
    up *= s;
    down *= s;
}

double SpinorState::mean_x() const {
    const int n = grid.n_points;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += grid.x(j) * (std::norm(up[j]) + std::norm(down[j]));
    return acc * grid.dx() / norm2();
}

double SpinorState::mean_x2() const {
    const int n = grid.n_points;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        acc += x * x * (std::norm(up[j]) + std::norm(down[j]));
    }
    return acc * grid.dx() / norm2();
}

double SpinorState::sigma_z() const {
    const double nu = up.abs2().sum(), nd = down.abs2().sum();
    return (nu - nd) / (nu + nd);
}

double SpinorState::boundary_ratio() const {
    const int n = grid.n_points;
    const auto amp = [&](int j) { return std::sqrt(std::norm(up[j]) + std::norm(down[j])); };
    double peak = 0.0;
    for (int j = 0; j < n; ++j) peak = std::max(peak, amp(j));
    const double edge = std::max(amp(0), amp(n - 1));
    return peak > 0 ? edge / peak : 0.0;
}

bool SpinorState::finite() const { return up.allFinite() && down.allFinite(); }

SpinorState build_initial_state(const ModelParams& p, const QuadratureGrid& grid, Well well) {
    grid.validate();
    const double sign = (well == Well::right) ? 1.0 : -1.0;
    const double x0 = sign * steady_state_displacement(p);
    const auto q = lower_adiabatic_qubit_state(p, x0);
    SpinorState st;
    st.grid = grid;
    st.up.resize(grid.n_points);
    st.down.resize(grid.n_points);
    const double norm_c = std::pow(kPi, -0.25);
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        const double psi = norm_c * std::exp(-0.5 * (x - x0) * (x - x0));
        st.up[j] = q[0] * psi;
        st.down[j] = q[1] * psi;
    }
    st.t = 0.0;
    st.normalize();
    if (st.boundary_ratio() > 1e-6)
        throw std::invalid_argument("build_initial_state: wavepacket does not fit the grid");
    return st;
}

struct SplitStepPropagator::Impl {
    ModelParams params;
    QuadratureGrid grid;
    double dt;
    DriveMode mode;

    // Static per-point data.
    CArr m00, m01, m11;   // qubit rotation times the quadratic-potential phase
    CArr kin0;            // exp(-i dt k^2 / 2), FFT ordering
    RArr decay;           // exp(-kappa x^2 dt)
    RArr x, x2;

    // Scratch.
    mutable CArr lin;     // per-step linear phases
    mutable CArr a, b;
    mutable std::unique_ptr<Fft1d> fft;

    Impl(const ModelParams& p, const QuadratureGrid& g, double dt_, DriveMode m)
        : params(p), grid(g), dt(dt_), mode(m) {
        p.validate();
        g.validate();
        if (!(dt > 0)) throw std::invalid_argument("SplitStepPropagator: dt must be positive");
        const int n = g.n_points;
        m00.resize(n);
        m01.resize(n);
        m11.resize(n);
        kin0.resize(n);
        decay.resize(n);
        x.resize(n);
        x2.resize(n);
        lin.resize(n);
        a.resize(n);
        b.resize(n);
        fft = std::make_unique<Fft1d>(n);
        for (int j = 0; j < n; ++j) {
            const double xj = g.x(j);
            x[j] = xj;
            x2[j] = xj * xj;
            // exp(-i (dt/2) (x^2/2 * I + (Omega/2) sz + sqrt(2) g x sx))
            const double hz = 0.5 * p.Omega, hx = kSqrt2 * p.g * xj;
            const double h = std::hypot(hz, hx);
            const double th = 0.5 * dt_ * h;
            const double c = std::cos(th), s = std::sin(th);
            const double nz = h > 0 ? hz / h : 0.0, nx = h > 0 ? hx / h : 0.0;
            const cplx quad = std::polar(1.0, -0.25 * dt_ * xj * xj);
            m00[j] = quad * cplx(c, -s * nz);
            m11[j] = quad * cplx(c, +s * nz);
            m01[j] = quad * cplx(0.0, -s * nx);
            const double k = g.k(j);
            kin0[j] = std::polar(1.0, -0.5 * dt_ * k * k);
            decay[j] = std::exp(-p.kappa * xj * xj * dt_);
        }
    }

    void half_potential(SpinorState& st, double tmid) const {
        const double f = drive_x_coupling(params, tmid, mode);
        fill_linear_phase(lin, -0.5 * dt * f * grid.x_min, -0.5 * dt * f * grid.dx());
        a = lin * (m00 * st.up + m01 * st.down);
        b = lin * (m01 * st.up + m11 * st.down);
        st.up.swap(a);
        st.down.swap(b);
    }

    void kinetic(SpinorState& st, double tmid) const {
        const double A = vector_potential(params, tmid, mode);
        const int n = grid.n_points;
        const double dk = 2.0 * kPi / (n * grid.dx());
        // exp(-i dt (k^2/2 + A k + A^2/2)); k is linear in the FFT index up
        // to the wrap at n/2, fixed up by a constant factor on the top half.
        fill_linear_phase(lin, -dt * A * A * 0.5, -dt * A * dk);
        const cplx wrap = std::polar(1.0, dt * A * dk * static_cast<double>(n));
        for (int j = n / 2; j < n; ++j) lin[j] *= wrap;
        lin *= kin0;
        const double inv_n = 1.0 / n;
        for (auto* comp : {&st.up, &st.down}) {
            std::copy(comp->data(), comp->data() + n, fft->data());
            fft->forward();
            for (int j = 0; j < n; ++j) fft->data()[j] *= lin[j] * inv_n;
            fft->backward();
            std::copy(fft->data(), fft->data() + n, comp->data());
        }
    }

    void step(SpinorState& st) const {
        const double t = st.t;
        half_potential(st, t + 0.25 * dt);
        kinetic(st, t + 0.5 * dt);
        half_potential(st, t + 0.75 * dt);
        st.t = t + dt;
    }
};

SplitStepPropagator::SplitStepPropagator(const ModelParams& p, const QuadratureGrid& grid, double dt,
                                         DriveMode mode)
    : impl_(std::make_unique<Impl>(p, grid, dt, mode)) {}
SplitStepPropagator::~SplitStepPropagator() = default;

const QuadratureGrid& SplitStepPropagator::grid() const { return impl_->grid; }
double SplitStepPropagator::dt() const { return impl_->dt; }

void SplitStepPropagator::step(SpinorState& state) const {
    if (!(state.grid == impl_->grid))
        throw std::invalid_argument("SplitStepPropagator::step: state grid mismatch");
    impl_->step(state);
}

double SplitStepPropagator::no_jump_step(SpinorState& state) const {
    step(state);
    if (impl_->params.kappa == 0.0) return 0.0;
    const double before = state.norm2();
    state.up *= impl_->decay;
    state.down *= impl_->decay;
    return before - state.norm2();
}

void SplitStepPropagator::momentum_moments(const SpinorState& state, double& mean_p, double& mean_p2) const {
    const int n = impl_->grid.n_points;
    double w = 0, wk = 0, wk2 = 0;
    for (const auto* comp : {&state.up, &state.down}) {
        std::copy(comp->data(), comp->data() + n, impl_->fft->data());
        impl_->fft->forward();
        for (int j = 0; j < n; ++j) {
            const double k = impl_->grid.k(j);
            const double a2 = std::norm(impl_->fft->data()[j]);
            w += a2;
            wk += k * a2;
            wk2 += k * k * a2;
        }
    }
    mean_p = wk / w;
    mean_p2 = wk2 / w;
}

void split_step(SpinorState& state, const ModelParams& p, double dt, DriveMode mode) {
    SplitStepPropagator prop(p, state.grid, dt, mode);
    prop.step(state);
}

double no_jump_step(SpinorState& state, const ModelParams& p, double dt, DriveMode mode) {
    SplitStepPropagator prop(p, state.grid, dt, mode);
    return prop.no_jump_step(state);
}

bool maybe_jump(SpinorState& state, double kappa, double dt, double uniform_draw,
                double* delta_p_out) {
    if (kappa < 0 || dt <= 0) throw std::invalid_argument("maybe_jump: kappa >= 0 and dt > 0 required");
    if (kappa == 0.0) {
        if (delta_p_out) *delta_p_out = 0.0;
        state.normalize();
        return false;
    }
    const double delta_p = 2.0 * kappa * dt * state.mean_x2();
    if (delta_p_out) *delta_p_out = delta_p;
    if (!(delta_p < 0.1))
        throw std::runtime_error("maybe_jump: jump probability per step delta_p=" + std::to_string(delta_p) +
                                 " >= 0.1; reduce dt");
    if (uniform_draw < delta_p) {
        for (int j = 0; j < state.grid.n_points; ++j) {
            const double x = state.grid.x(j);
            state.up[j] *= x;
            state.down[j] *= x;
        }
        state.normalize();
        return true;
    }
    state.normalize();
    return false;
}

std::vector<double> sample_times(const TrajectoryOptions& opts) {
    const double ratio = opts.sample_interval / opts.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("TrajectoryOptions: dt must divide sample_interval");
    const double nr = opts.t_final / opts.sample_interval;
    if (std::abs(nr - std::round(nr)) > 1e-9 * std::max(1.0, nr))
        throw std::invalid_argument("TrajectoryOptions: sample_interval must divide t_final");
    const auto n = static_cast<std::size_t>(std::llround(nr));
    std::vector<double> times(n + 1);
    for (std::size_t k = 0; k <= n; ++k) times[k] = opts.sample_interval * static_cast<double>(k);
    return times;
}

void run_trajectory_visit(
    const ModelParams& p, const QuadratureGrid& grid, const TrajectoryOptions& opts,
    const std::function<void(std::size_t, const SpinorState&, const SplitStepPropagator&)>& visit,
    JumpRecord* jumps, TrajectoryDiagnostics* diag) {
    if (!(opts.t_final > 0) || !(opts.dt > 0) || !(opts.sample_interval > 0))
        throw std::invalid_argument("TrajectoryOptions: t_final, dt, sample_interval must be positive");
    const auto times = sample_times(opts);
    const auto steps_per_sample = static_cast<std::size_t>(std::llround(opts.sample_interval / opts.dt));

    SplitStepPropagator prop(p, grid, opts.dt, opts.mode);
    SpinorState st = build_initial_state(p, grid, opts.well);
    PhiloxRng rng(opts.seed, opts.trajectory_id);
    TrajectoryDiagnostics d;
    if (jumps) {
        jumps->trajectory_id = opts.trajectory_id;
        jumps->seed = opts.seed;
        jumps->times.clear();
    }

    visit(0, st, prop);
    d.max_boundary_ratio = st.boundary_ratio();
    for (std::size_t k = 1; k < times.size(); ++k) {
        for (std::size_t s = 0; s < steps_per_sample; ++s) {
            prop.no_jump_step(st);
            if (p.kappa > 0.0) {
                double dp = 0.0;
                if (maybe_jump(st, p.kappa, opts.dt, rng.uniform(), &dp)) {
                    if (jumps) jumps->times.push_back(st.t);
                }
                d.max_delta_p = std::max(d.max_delta_p, dp);
            } else {
                st.normalize();
            }
            ++d.n_steps;
        }
        st.t = times[k];  // keep sample times exact against dt rounding
        if (!st.finite())
            throw std::runtime_error("run_trajectory: state became non-finite at t=" + std::to_string(st.t));
        const double br = st.boundary_ratio();
        d.max_boundary_ratio = std::max(d.max_boundary_ratio, br);
        if (br > 1e-3)
            throw std::runtime_error("run_trajectory: edge amplitude reached " + std::to_string(br) +
                                     " of peak at t=" + std::to_string(st.t) +
                                     "; the packet no longer fits the box (widen the grid)");
        visit(k, st, prop);
    }
    if (diag) *diag = d;
}

TrajectoryResult run_trajectory(const ModelParams& p, const QuadratureGrid& grid,
                                const TrajectoryOptions& opts) {
    TrajectoryResult res;
    res.times = sample_times(opts);
    res.snapshots.reserve(res.times.size());
    run_trajectory_visit(
        p, grid, opts,
        [&](std::size_t, const SpinorState& st, const SplitStepPropagator&) { res.snapshots.push_back(st); },
        &res.jumps, &res.diagnostics);
    return res;
}

}  // namespace qchaos
