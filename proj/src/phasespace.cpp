#include "qchaos/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "qchaos/fft.hpp"

namespace qchaos {

namespace {
constexpr double kPi = 3.1415926535897932385;
using cplx = std::complex<double>;

double axis_step(const Eigen::VectorXd& axis, const char* what) {
    if (axis.size() < 2) throw std::invalid_argument(std::string(what) + ": axis needs >= 2 points");
    return axis(1) - axis(0);
}

void require_matching_axes(const PhaseSpaceDistribution& a, const PhaseSpaceDistribution& b) {
    const bool ok = a.x_axis.size() == b.x_axis.size() && a.p_axis.size() == b.p_axis.size() &&
                    (a.x_axis - b.x_axis).cwiseAbs().maxCoeff() < 1e-12 &&
                    (a.p_axis - b.p_axis).cwiseAbs().maxCoeff() < 1e-12;
    if (!ok) throw std::invalid_argument("phase-space distributions have mismatched axes");
}

}  // namespace

double PhaseSpaceDistribution::dx() const { return axis_step(x_axis, "PhaseSpaceDistribution"); }
double PhaseSpaceDistribution::dp() const { return axis_step(p_axis, "PhaseSpaceDistribution"); }
double PhaseSpaceDistribution::integral() const { return values.sum() * dx() * dp(); }

double FieldKernel::trace() const { return rho.diagonal().sum().real() * grid.dx(); }

double FieldKernel::hermiticity_error() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

FieldKernel field_kernel(const SpinorState& state) {
    FieldKernel k;
    k.grid = state.grid;
    k.t = state.t;
    const int n = state.grid.n_points;
    Eigen::Map<const Eigen::VectorXcd> up(state.up.data(), n);
    Eigen::Map<const Eigen::VectorXcd> down(state.down.data(), n);
    k.rho.noalias() = up * up.adjoint();
    k.rho.noalias() += down * down.adjoint();
    return k;
}

void accumulate_field_kernel(FieldKernel& acc, const SpinorState& state, double weight) {
    const int n = state.grid.n_points;
    if (acc.rho.size() == 0) {
        acc.grid = state.grid;
        acc.rho = Eigen::MatrixXcd::Zero(n, n);
    } else if (!(acc.grid == state.grid)) {
        throw std::invalid_argument("accumulate_field_kernel: grid mismatch");
    }
    Eigen::Map<const Eigen::VectorXcd> up(state.up.data(), n);
    Eigen::Map<const Eigen::VectorXcd> down(state.down.data(), n);
    acc.rho.noalias() += weight * (up * up.adjoint());
    acc.rho.noalias() += weight * (down * down.adjoint());
    acc.t = state.t;
}

FieldKernel field_kernel_from_density(const BipartiteDensityMatrix& rho,
                                      const QuadratureGrid& grid) {
    const int m = rho.n_max + 1;
    if (rho.entries.rows() != 2 * m)
        throw std::invalid_argument("field_kernel_from_density: dimension mismatch");
    if (!(grid.dx() * std::sqrt(2.0 * rho.n_max + 1.0) < 1.0))
        throw std::invalid_argument("field_kernel_from_density: grid too coarse for the cutoff");
    // Field reduction: trace out the qubit (sum of the two diagonal blocks).
    Eigen::MatrixXcd rf = rho.entries.block(0, 0, m, m) + rho.entries.block(m, m, m, m);
    const Eigen::MatrixXd basis = hermite_basis(grid, rho.n_max);  // (m) x (n)
    Eigen::MatrixXd tr = rf.real() * basis;                        // m x n
    Eigen::MatrixXd ti = rf.imag() * basis;
    FieldKernel k;
    k.grid = grid;
    k.t = rho.t;
    const int n = grid.n_points;
    k.rho.resize(n, n);
    Eigen::MatrixXd re = basis.transpose() * tr;  // n x n
    Eigen::MatrixXd im = basis.transpose() * ti;
    k.rho.real() = re;
    k.rho.imag() = im;
    return k;
}

namespace {

void check_kernel_hermitian(const FieldKernel& kernel) {
    const double scale = kernel.rho.cwiseAbs().maxCoeff();
    if (scale == 0.0) throw std::invalid_argument("wigner: zero kernel");
    if (kernel.hermiticity_error() > 1e-8 * scale)
        throw std::invalid_argument("wigner: kernel is not Hermitian within tolerance");
}

}  // namespace

PhaseSpaceDistribution wigner(const FieldKernel& kernel) {
    check_kernel_hermitian(kernel);
    const int n = kernel.grid.n_points;
    const double dx = kernel.grid.dx();

    PhaseSpaceDistribution d;
    d.kind = DistributionKind::wigner;
    d.t = kernel.t;
    d.x_axis.resize(n);
    for (int j = 0; j < n; ++j) d.x_axis(j) = kernel.grid.x(j);
    d.p_axis.resize(n);
    const double dp = kPi / (n * dx);
    for (int l = 0; l < n; ++l) d.p_axis(l) = dp * (l - n / 2);
    d.values.resize(n, n);

    Fft1d fft(n);
    double max_imag = 0.0;
    const double scale = dx / kPi;
    for (int j = 0; j < n; ++j) {
        cplx* buf = fft.data();
        std::fill(buf, buf + n, cplx(0.0, 0.0));
        const int mmax = std::min(j, n - 1 - j);
        buf[0] = kernel.rho(j, j);
        for (int m = 1; m <= mmax; ++m) {
            buf[m] = kernel.rho(j - m, j + m);
            buf[n - m] = kernel.rho(j + m, j - m);
        }
        fft.backward();  // sum_m buf[m] e^{+2 pi i l m / n}
        for (int l = 0; l < n; ++l) {
            const cplx w = buf[l];
            max_imag = std::max(max_imag, std::abs(w.imag()));
            // FFT index l carries momentum pi*l'/(n dx) with l' = l (l < n/2)
            // or l - n (l >= n/2); remap to the ascending axis.
            const int col = (l < n / 2) ? l + n / 2 : l - n / 2;
            d.values(j, col) = scale * w.real();
        }
    }
    const double peak = d.values.cwiseAbs().maxCoeff();
    if (max_imag * scale > 1e-10 * std::max(peak, 1e-300))
        throw std::runtime_error("wigner: imaginary residue above tolerance");
    return d;
}

PhaseSpaceDistribution wigner(const FieldKernel& kernel, const Eigen::VectorXd& x_axis,
                              const Eigen::VectorXd& p_axis) {
    check_kernel_hermitian(kernel);
    const int n = kernel.grid.n_points;
    const double dx = kernel.grid.dx();

    PhaseSpaceDistribution d;
    d.kind = DistributionKind::wigner;
    d.t = kernel.t;
    d.x_axis = x_axis;
    d.p_axis = p_axis;
    d.values.resize(x_axis.size(), p_axis.size());

    const double scale = dx / kPi;
    std::vector<cplx> f;  // f[m] = rho(x_{j-m}, x_{j+m}), m >= 1
    for (Eigen::Index i = 0; i < x_axis.size(); ++i) {
        int j = static_cast<int>(std::lround((x_axis(i) - kernel.grid.x_min) / dx));
        j = std::clamp(j, 0, n - 1);
        const int mmax = std::min(j, n - 1 - j);
        f.resize(static_cast<std::size_t>(mmax) + 1);
        f[0] = kernel.rho(j, j);
        for (int m = 1; m <= mmax; ++m) f[m] = kernel.rho(j - m, j + m);
        for (Eigen::Index c = 0; c < p_axis.size(); ++c) {
            const double theta = 2.0 * p_axis(c) * dx;
            const cplx rot = std::polar(1.0, theta);
            double acc = f[0].real();
            cplx cur = rot;
            for (int m = 1; m <= mmax; ++m) {
                if ((m & 31) == 0) cur = std::polar(1.0, theta * m);
                // Hermitian pair m and -m combine to twice the real part.
                acc += 2.0 * (cur.real() * f[m].real() - cur.imag() * f[m].imag());
                cur *= rot;
            }
            d.values(i, c) = scale * acc;
        }
    }
    return d;
}

PhaseSpaceDistribution husimi_from_wigner(const PhaseSpaceDistribution& w) {
    if (w.kind != DistributionKind::wigner)
        throw std::invalid_argument("husimi_from_wigner: input must be a Wigner distribution");
    const double hx = w.dx(), hp = w.dp();
    if (!(hx <= 1.0 / 6.0 + 1e-12) || !(hp <= 1.0 / 6.0 + 1e-12))
        throw std::invalid_argument(
            "husimi_from_wigner: grid too coarse for the unit Gaussian kernel (need >= 6 "
            "points per unit on both axes)");

    const auto kernel1d = [](double h) {
        const int half = static_cast<int>(std::ceil(8.0 / h));
        Eigen::VectorXd k(2 * half + 1);
        for (int i = -half; i <= half; ++i)
            k(i + half) = std::exp(-(i * h) * (i * h)) * h / std::sqrt(kPi);
        return k;
    };
    const Eigen::VectorXd kx = kernel1d(hx);
    const Eigen::VectorXd kp = kernel1d(hp);
    const int hxn = (static_cast<int>(kx.size()) - 1) / 2;
    const int hpn = (static_cast<int>(kp.size()) - 1) / 2;

    const Eigen::Index nr = w.values.rows(), nc = w.values.cols();
    Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(nr, nc);
    for (Eigen::Index i = 0; i < nr; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - hxn);
        const Eigen::Index hi = std::min<Eigen::Index>(nr - 1, i + hxn);
        for (Eigen::Index s = lo; s <= hi; ++s)
            tmp.row(i) += kx(s - i + hxn) * w.values.row(s);
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nr, nc);
    for (Eigen::Index c = 0; c < nc; ++c) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, c - hpn);
        const Eigen::Index hi = std::min<Eigen::Index>(nc - 1, c + hpn);
        for (Eigen::Index s = lo; s <= hi; ++s)
            out.col(c) += kp(s - c + hpn) * tmp.col(s);
    }

    const double peak = out.cwiseAbs().maxCoeff();
    const double lowest = out.minCoeff();
    if (lowest < -1e-12 * std::max(peak, 1e-300))
        throw std::runtime_error("husimi_from_wigner: negative values beyond numerical residue");
    PhaseSpaceDistribution q;
    q.kind = DistributionKind::husimi;
    q.source = w.source;
    q.t = w.t;
    q.x_axis = w.x_axis;
    q.p_axis = w.p_axis;
    q.values = out.cwiseMax(0.0);
    return q;
}

NegativeFraction negative_fraction(const PhaseSpaceDistribution& w) {
    if (w.kind != DistributionKind::wigner)
        throw std::invalid_argument("negative_fraction: input must be a Wigner distribution");
    const double cell = w.dx() * w.dp();
    NegativeFraction f;
    f.n_minus = w.values.cwiseMin(0.0).sum() * cell;
    f.n_plus = w.values.cwiseMax(0.0).sum() * cell;
    return f;
}

double width_from_moments(const QuadratureMoments& m) {
    double vx = m.mean_x2 - m.mean_x * m.mean_x;
    double vp = m.mean_p2 - m.mean_p * m.mean_p;
    if (vx < -1e-10 || vp < -1e-10)
        throw std::runtime_error("width_from_moments: negative variance beyond tolerance");
    vx = std::max(vx, 0.0);
    vp = std::max(vp, 0.0);
    return std::sqrt(vx * vp);
}

double nonselective_width(const std::vector<QuadratureMoments>& per_trajectory) {
    if (per_trajectory.empty())
        throw std::invalid_argument("nonselective_width: empty moment list");
    QuadratureMoments avg;
    for (const auto& m : per_trajectory) {
        avg.mean_x += m.mean_x;
        avg.mean_x2 += m.mean_x2;
        avg.mean_p += m.mean_p;
        avg.mean_p2 += m.mean_p2;
    }
    const double inv = 1.0 / static_cast<double>(per_trajectory.size());
    avg.mean_x *= inv;
    avg.mean_x2 *= inv;
    avg.mean_p *= inv;
    avg.mean_p2 *= inv;
    return width_from_moments(avg);
}

double selective_width(const std::vector<QuadratureMoments>& per_trajectory) {
    if (per_trajectory.empty())
        throw std::invalid_argument("selective_width: empty moment list");
    double acc = 0.0;
    for (const auto& m : per_trajectory) acc += width_from_moments(m);
    return acc / static_cast<double>(per_trajectory.size());
}

namespace {

Eigen::ArrayXd ascending_momentum_axis(const QuadratureGrid& grid) {
    const int n = grid.n_points;
    const double dk = 2.0 * kPi / (n * grid.dx());
    Eigen::ArrayXd axis(n);
    for (int l = 0; l < n; ++l) axis(l) = dk * (l - n / 2);
    return axis;
}

// FFT index l -> position on the ascending momentum axis.
inline int momentum_axis_pos(int l, int n) { return (l < n / 2) ? l + n / 2 : l - n / 2; }

}  // namespace

Marginals marginals(const SpinorState& state) {
    const int n = state.grid.n_points;
    const double dx = state.grid.dx();
    Marginals m;
    m.grid = state.grid;
    m.position.resize(n);
    for (int j = 0; j < n; ++j)
        m.position(j) = std::norm(state.up[j]) + std::norm(state.down[j]);
    m.momentum = Eigen::ArrayXd::Zero(n);
    m.momentum_axis = ascending_momentum_axis(state.grid);

    Fft1d fft(n);
    const double scale = dx * dx / (2.0 * kPi);
    for (const auto* comp : {&state.up, &state.down}) {
        std::copy(comp->data(), comp->data() + n, fft.data());
        fft.forward();
        for (int l = 0; l < n; ++l)
            m.momentum(momentum_axis_pos(l, n)) += scale * std::norm(fft.data()[l]);
    }
    return m;
}

Marginals marginals(const FieldKernel& kernel) {
    check_kernel_hermitian(kernel);
    const int n = kernel.grid.n_points;
    const double dx = kernel.grid.dx();
    Marginals m;
    m.grid = kernel.grid;
    m.position = kernel.rho.diagonal().real().array();
    m.momentum = Eigen::ArrayXd::Zero(n);
    m.momentum_axis = ascending_momentum_axis(kernel.grid);

    // A(l, k) = sum_j e^{-2 pi i l j / n} rho(j, k)  (FFT over rows).
    Eigen::MatrixXcd a(n, n);
    Fft1d fft(n);
    for (int k = 0; k < n; ++k) {
        std::copy(kernel.rho.col(k).data(), kernel.rho.col(k).data() + n, fft.data());
        fft.forward();
        std::copy(fft.data(), fft.data() + n, a.col(k).data());
    }
    // P(l) = (dx^2 / 2pi) sum_k A(l, k) e^{+2 pi i l k / n}.
    const double scale = dx * dx / (2.0 * kPi);
    for (int l = 0; l < n; ++l) {
        const double theta = 2.0 * kPi * l / n;
        const cplx rot = std::polar(1.0, theta);
        cplx cur(1.0, 0.0), acc(0.0, 0.0);
        for (int k = 0; k < n; ++k) {
            if ((k & 31) == 0) cur = std::polar(1.0, theta * k);
            acc += a(l, k) * cur;
            cur *= rot;
        }
        m.momentum(momentum_axis_pos(l, n)) += scale * acc.real();
    }
    return m;
}

Eigen::ArrayXd position_marginal(const PhaseSpaceDistribution& d) {
    return d.values.rowwise().sum().array() * d.dp();
}

Eigen::ArrayXd momentum_marginal(const PhaseSpaceDistribution& d) {
    return d.values.colwise().sum().array() * d.dx();
}

Eigen::ArrayXd momentum_marginal_at(const SpinorState& state, const Eigen::VectorXd& p_axis) {
    const int n = state.grid.n_points;
    const double dx = state.grid.dx();
    Eigen::ArrayXd out(p_axis.size());
    const double scale = dx * dx / (2.0 * kPi);
    for (Eigen::Index c = 0; c < p_axis.size(); ++c) {
        const double theta = -p_axis(c) * dx;
        cplx su(0.0, 0.0), sd(0.0, 0.0);
        const cplx rot = std::polar(1.0, theta);
        const cplx base = std::polar(1.0, -p_axis(c) * state.grid.x_min);
        cplx cur = base;
        for (int j = 0; j < n; ++j) {
            if ((j & 31) == 0) cur = base * std::polar(1.0, theta * j);
            su += state.up[j] * cur;
            sd += state.down[j] * cur;
            cur *= rot;
        }
        out(c) = scale * (std::norm(su) + std::norm(sd));
    }
    return out;
}

PhaseSpaceDistribution time_averaged_distribution(
    const std::vector<PhaseSpaceDistribution>& series) {
    if (series.empty())
        throw std::invalid_argument("time_averaged_distribution: empty window");
    PhaseSpaceDistribution avg = series.front();
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].kind != avg.kind)
            throw std::invalid_argument("time_averaged_distribution: mixed kinds");
        require_matching_axes(series[i], avg);
        avg.values += series[i].values;
    }
    avg.values /= static_cast<double>(series.size());
    avg.source = DistributionSource::ensemble_average;
    avg.t = series.back().t;
    return avg;
}

namespace {

void bin_members(const std::vector<SemiclassicalState>& members, const Eigen::VectorXd& x_axis,
                 const Eigen::VectorXd& p_axis, Eigen::MatrixXd& counts, long long& n_in) {
    const double x0 = x_axis(0), p0 = p_axis(0);
    const double hx = axis_step(x_axis, "histogram_distribution");
    const double hp = axis_step(p_axis, "histogram_distribution");
    for (const auto& s : members) {
        const auto i = static_cast<Eigen::Index>(std::lround((s.x - x0) / hx));
        const auto j = static_cast<Eigen::Index>(std::lround((s.p - p0) / hp));
        if (i < 0 || i >= counts.rows() || j < 0 || j >= counts.cols()) continue;
        counts(i, j) += 1.0;
        ++n_in;
    }
}

PhaseSpaceDistribution finish_histogram(Eigen::MatrixXd& counts, long long n_in,
                                        const Eigen::VectorXd& x_axis,
                                        const Eigen::VectorXd& p_axis, double t) {
    if (n_in == 0) throw std::invalid_argument("histogram_distribution: no members in range");
    PhaseSpaceDistribution d;
    d.kind = DistributionKind::histogram;
    d.source = DistributionSource::ensemble_average;
    d.t = t;
    d.x_axis = x_axis;
    d.p_axis = p_axis;
    const double hx = axis_step(x_axis, "histogram_distribution");
    const double hp = axis_step(p_axis, "histogram_distribution");
    d.values = counts / (static_cast<double>(n_in) * hx * hp);
    return d;
}

}  // namespace

PhaseSpaceDistribution histogram_distribution(const std::vector<SemiclassicalState>& members,
                                              const Eigen::VectorXd& x_axis,
                                              const Eigen::VectorXd& p_axis, double t) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(x_axis.size(), p_axis.size());
    long long n_in = 0;
    bin_members(members, x_axis, p_axis, counts, n_in);
    return finish_histogram(counts, n_in, x_axis, p_axis, t);
}

PhaseSpaceDistribution histogram_distribution(
    const std::vector<std::vector<SemiclassicalState>>& snapshots,
    const Eigen::VectorXd& x_axis, const Eigen::VectorXd& p_axis) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(x_axis.size(), p_axis.size());
    long long n_in = 0;
    for (const auto& members : snapshots) bin_members(members, x_axis, p_axis, counts, n_in);
    return finish_histogram(counts, n_in, x_axis, p_axis, 0.0);
}

double distribution_entropy(const PhaseSpaceDistribution& d) {
    const double peak = d.values.cwiseAbs().maxCoeff();
    if (d.values.minCoeff() < -1e-12 * std::max(peak, 1e-300))
        throw std::invalid_argument("distribution_entropy: needs a non-negative distribution");
    const double total = d.values.cwiseMax(0.0).sum();
    if (!(total > 0.0)) throw std::invalid_argument("distribution_entropy: empty distribution");
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.values.cols(); ++j) {
            const double q = std::max(d.values(i, j), 0.0) / total;
            if (q > 0.0) s -= q * std::log(q);
        }
    }
    return s;
}

double jaccard_overlap(const PhaseSpaceDistribution& a, const PhaseSpaceDistribution& b,
                       double level_fraction) {
    require_matching_axes(a, b);
    const double la = level_fraction * a.values.cwiseAbs().maxCoeff();
    const double lb = level_fraction * b.values.cwiseAbs().maxCoeff();
    long long inter = 0, uni = 0;
    for (Eigen::Index i = 0; i < a.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.values.cols(); ++j) {
            const bool in_a = std::abs(a.values(i, j)) > la;
            const bool in_b = std::abs(b.values(i, j)) > lb;
            if (in_a && in_b) ++inter;
            if (in_a || in_b) ++uni;
        }
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double total_variation_around_max(const PhaseSpaceDistribution& d, double half_width) {
    Eigen::Index imax = 0, jmax = 0;
    d.values.maxCoeff(&imax, &jmax);
    const auto ri = static_cast<Eigen::Index>(std::floor(half_width / d.dx()));
    const auto rj = static_cast<Eigen::Index>(std::floor(half_width / d.dp()));
    const Eigen::Index i0 = std::max<Eigen::Index>(0, imax - ri);
    const Eigen::Index i1 = std::min<Eigen::Index>(d.values.rows() - 1, imax + ri);
    const Eigen::Index j0 = std::max<Eigen::Index>(0, jmax - rj);
    const Eigen::Index j1 = std::min<Eigen::Index>(d.values.cols() - 1, jmax + rj);
    double tv = 0.0;
    for (Eigen::Index i = i0; i <= i1; ++i)
        for (Eigen::Index j = j0; j < j1; ++j) tv += std::abs(d.values(i, j + 1) - d.values(i, j));
    for (Eigen::Index j = j0; j <= j1; ++j)
        for (Eigen::Index i = i0; i < i1; ++i) tv += std::abs(d.values(i + 1, j) - d.values(i, j));
    return tv;
}

double total_variation(const Eigen::ArrayXd& profile) {
    double tv = 0.0;
    for (Eigen::Index i = 0; i + 1 < profile.size(); ++i)
        tv += std::abs(profile(i + 1) - profile(i));
    return tv;
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("linspace: need n >= 2 and hi > lo");
    Eigen::VectorXd v(n);
    const double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) v(i) = lo + step * i;
    return v;
}

}  // namespace qchaos
