#include "qchaos/semiclassical.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "qchaos/parallel.hpp"
#include "qchaos/rng.hpp"

namespace qchaos {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kTwoPi = 6.2831853071795864769;

using Vec5 = Eigen::Matrix<double, 5, 1>;

Vec5 pack(const SemiclassicalState& s) {
    Vec5 y;
    y << s.x, s.p, s.u, s.v, s.Z;
    return y;
}
SemiclassicalState unpack(const Vec5& y) { return {y[0], y[1], y[2], y[3], y[4]}; }

struct EomRhs {
    const ModelParams& p;
    DriveMode mode;
    void operator()(double t, const Vec5& y, Vec5& dy) const {
        const double eta = drive_amplitude(p, t, mode);
        const double sd = std::sin(p.omega_d * t), cd = std::cos(p.omega_d * t);
        const double gx = kSqrt2 * p.g;
        dy[0] = y[1] + kSqrt2 * eta * sd;
        dy[1] = -y[0] - gx * y[2] - kSqrt2 * eta * cd;
        dy[2] = -0.5 * p.Omega * y[3];
        dy[3] = 0.5 * p.Omega * y[2] - gx * y[0] * y[4];
        dy[4] = gx * y[0] * y[3];
    }
};

void renorm_bloch(Vec5& y) {
    const double n2 = y[2] * y[2] + y[3] * y[3] + y[4] * y[4];
    if (std::abs(n2 - 1.0) > 1e-12 && n2 > 0.0) {
        const double s = 1.0 / std::sqrt(n2);
        y[2] *= s;
        y[3] *= s;
        y[4] *= s;
    }
}
}  // namespace

SemiclassicalState eom_derivative(const ModelParams& p, const SemiclassicalState& s, double t, DriveMode mode) {
    Vec5 dy;
    EomRhs{p, mode}(t, pack(s), dy);
    return unpack(dy);
}

double semiclassical_energy(const ModelParams& p, const SemiclassicalState& s, double t, DriveMode mode) {
    const double eta = drive_amplitude(p, t, mode);
    return 0.5 * s.p * s.p + 0.5 * s.x * s.x + s.p * kSqrt2 * eta * std::sin(p.omega_d * t) +
           s.x * kSqrt2 * eta * std::cos(p.omega_d * t) + kSqrt2 * p.g * s.x * s.u + 0.5 * p.Omega * s.Z;
}

SemiclassicalState integrate(const ModelParams& p, SemiclassicalState s, double t0, double t1,
                             const IntegrateOptions& opts, DriveMode mode) {
    Vec5 y = pack(s);
    integrate_adaptive(EomRhs{p, mode}, y, t0, t1, opts, {renorm_bloch});
    return unpack(y);
}

TWAEnsemble sample_initial_ensemble(const ModelParams& p, std::size_t n, std::uint64_t seed, Well well) {
    if (n == 0) throw std::invalid_argument("sample_initial_ensemble: n must be >= 1");
    const double sign = (well == Well::right) ? 1.0 : -1.0;
    const double xs = steady_state_displacement(p);  // throws below the pitchfork threshold
    const double sigma = std::sqrt(0.5);
    TWAEnsemble ens;
    ens.params = p;
    ens.seed = seed;
    ens.members.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        PhiloxRng rng(seed, i);
        SemiclassicalState s;
        s.x = sign * xs + sigma * rng.normal();
        s.p = sigma * rng.normal();
        s.u = -sign;
        s.v = 0.0;
        s.Z = 0.0;
        ens.members[i] = s;
    }
    return ens;
}

void evolve_ensemble(const TWAEnsemble& ens, const std::vector<double>& times,
                     const std::function<void(std::size_t, std::size_t, const SemiclassicalState&)>& visit,
                     const IntegrateOptions& opts, DriveMode mode) {
    for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k] <= times[k - 1])
            throw std::invalid_argument("evolve_ensemble: sample times must be strictly increasing");
    const ModelParams params = ens.params;
    parallel_for(ens.members.size(), [&](std::size_t i) {
        Vec5 y = pack(ens.members[i]);
        integrate_sampled(
            EomRhs{params, mode}, y, 0.0, times,
            [&](std::size_t k, double, const Vec5& yy) { visit(i, k, unpack(yy)); }, opts,
            {renorm_bloch});
    });
}

std::vector<std::vector<SemiclassicalState>> ensemble_snapshots(const TWAEnsemble& ens,
                                                                const std::vector<double>& times,
                                                                const IntegrateOptions& opts, DriveMode mode) {
    std::vector<std::vector<SemiclassicalState>> out(times.size(),
                                                     std::vector<SemiclassicalState>(ens.members.size()));
    evolve_ensemble(
        ens, times, [&](std::size_t i, std::size_t k, const SemiclassicalState& s) { out[k][i] = s; }, opts,
        mode);
    return out;
}

double drive_period(const ModelParams& p, DriveMode mode) {
    if (p.omega_d <= 0) throw std::invalid_argument("drive_period: omega_d must be positive");
    const double base = kTwoPi / p.omega_d;
    if (mode == DriveMode::constant || p.eta0 == 0.0 || p.omega_c == 0.0) return base;
    // Need the smallest k with k * omega_c / omega_d integral.
    const double r = p.omega_c / p.omega_d;
    for (int k = 1; k <= 256; ++k) {
        const double m = r * k;
        if (std::abs(m - std::round(m)) < 1e-9 * std::max(1.0, m)) return base * k;
    }
    throw std::domain_error("drive_period: omega_c/omega_d not commensurate (denominator > 256)");
}

std::vector<std::vector<SemiclassicalState>> stroboscopic_map(const TWAEnsemble& ens, int k_periods,
                                                              const IntegrateOptions& opts, DriveMode mode) {
    if (k_periods < 1) throw std::invalid_argument("stroboscopic_map: k_periods must be >= 1");
    const double T = drive_period(ens.params, mode);
    std::vector<double> times(k_periods);
    for (int k = 0; k < k_periods; ++k) times[k] = T * (k + 1);
    return ensemble_snapshots(ens, times, opts, mode);
}

double lyapunov_exponent(const ModelParams& p, const SemiclassicalState& s0, const LyapunovOptions& opts,
                         DriveMode mode) {
    if (opts.d0 <= 0 || opts.renorm_interval <= 0 || opts.t_total <= 0 || opts.max_step <= 0)
        throw std::invalid_argument(
            "lyapunov_exponent: t_total, renorm_interval, d0 and max_step must be positive");
    const EomRhs rhs{p, mode};
    Vec5 k1, k2, k3, k4, tmp;
    const auto rk4 = [&](Vec5& y, double t, double h) {
        rhs(t, y, k1);
        tmp = y + (0.5 * h) * k1;
        rhs(t + 0.5 * h, tmp, k2);
        tmp = y + (0.5 * h) * k2;
        rhs(t + 0.5 * h, tmp, k3);
        tmp = y + h * k3;
        rhs(t + h, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        renorm_bloch(y);
    };
    const long sub = std::max(1L, std::lround(std::ceil(opts.renorm_interval / opts.max_step)));
    const double h = opts.renorm_interval / static_cast<double>(sub);

    Vec5 a = pack(s0);
    Vec5 b = a;
    b[0] += opts.d0;
    double t = 0.0, acc = 0.0;
    while (t < opts.t_total - 1e-9) {
        for (long i = 0; i < sub && t < opts.t_total - 1e-9; ++i) {
            rk4(a, t, h);
            rk4(b, t, h);
            t += h;
        }
        const double d = (b - a).norm();
        acc += std::log(d / opts.d0);
        b = a + (b - a) * (opts.d0 / d);
    }
    return acc / t;
}

double classical_width(const std::vector<SemiclassicalState>& members) {
    if (members.empty()) throw std::invalid_argument("classical_width: empty ensemble");
    const double n = static_cast<double>(members.size());
    double mx = 0, mp = 0, mx2 = 0, mp2 = 0;
    for (const auto& s : members) {
        mx += s.x;
        mp += s.p;
        mx2 += s.x * s.x;
        mp2 += s.p * s.p;
    }
    mx /= n;
    mp /= n;
    mx2 /= n;
    mp2 /= n;
    const double vx = std::max(mx2 - mx * mx, 0.0);
    const double vp = std::max(mp2 - mp * mp, 0.0);
    return std::sqrt(vx * vp);
}

}  // namespace qchaos
