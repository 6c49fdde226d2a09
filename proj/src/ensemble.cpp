#include "qchaos/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "qchaos/parallel.hpp"

namespace qchaos {

namespace {

// Indices of options.projection_times within the sample schedule (exact match
// within 1e-9; anything else is a configuration error).
std::vector<std::size_t> projection_sample_indices(const std::vector<double>& times,
                                                   const std::vector<double>& wanted) {
    std::vector<std::size_t> idx;
    idx.reserve(wanted.size());
    for (double tw : wanted) {
        bool found = false;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (std::abs(times[k] - tw) <= 1e-9 * std::max(1.0, std::abs(tw))) {
                idx.push_back(k);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("run_ensemble: projection time " + std::to_string(tw) +
                                        " is not a sample time");
    }
    return idx;
}

}  // namespace

EnsembleResult run_ensemble(const ModelParams& params, const QuadratureGrid& grid,
                            const EnsembleOptions& options) {
    if (options.n_trajectories == 0)
        throw std::invalid_argument("run_ensemble: n_trajectories must be >= 1");
    TrajectoryOptions base;
    base.t_final = options.t_final;
    base.dt = options.dt;
    base.sample_interval = options.sample_interval;
    base.seed = options.seed;
    base.mode = options.mode;
    base.well = options.well;

    EnsembleResult res;
    res.options = options;
    res.times = sample_times(base);
    const std::size_t n_samples = res.times.size();
    const std::size_t n = options.n_trajectories;
    res.trajectories.resize(n);

    const auto proj_idx = projection_sample_indices(res.times, options.projection_times);
    if (!proj_idx.empty() && options.fock_n_max <= 0)
        throw std::invalid_argument("run_ensemble: projection_times require fock_n_max > 0");
    res.projections.assign(proj_idx.size(), std::vector<FockProjection>(n));

    Eigen::MatrixXd basis;
    if (options.fock_n_max > 0) basis = hermite_basis(grid, options.fock_n_max);

    parallel_for(n, [&](std::size_t i) {
        TrajectoryOptions opts = base;
        opts.trajectory_id = i;
        TrajectorySeries& s = res.trajectories[i];
        s.trajectory_id = i;
        s.mean_x.resize(n_samples);
        s.mean_p.resize(n_samples);
        s.mean_x2.resize(n_samples);
        s.mean_p2.resize(n_samples);
        s.sigma_z.resize(n_samples);
        s.width.resize(n_samples);
        if (options.fock_n_max > 0) {
            s.mean_n.resize(n_samples);
            s.mean_n2.resize(n_samples);
        }

        JumpRecord jumps;
        run_trajectory_visit(
            params, grid, opts,
            [&](std::size_t k, const SpinorState& st, const SplitStepPropagator& prop) {
                s.mean_x[k] = st.mean_x();
                s.mean_x2[k] = st.mean_x2();
                double mp = 0.0, mp2 = 0.0;
                prop.momentum_moments(st, mp, mp2);
                s.mean_p[k] = mp;
                s.mean_p2[k] = mp2;
                s.sigma_z[k] = st.sigma_z();
                QuadratureMoments m{s.mean_x[k], s.mean_x2[k], mp, mp2};
                s.width[k] = width_from_moments(m);
                if (options.fock_n_max > 0) {
                    const FockProjection proj = project_to_fock(st, basis);
                    const int nm = proj.n_max + 1;
                    double mn = 0.0, mn2 = 0.0;
                    for (int sc = 0; sc < 2; ++sc) {
                        for (int q = 0; q < nm; ++q) {
                            const double pop = std::norm(proj.coefficients(sc * nm + q));
                            mn += pop * q;
                            mn2 += pop * static_cast<double>(q) * q;
                        }
                    }
                    s.mean_n[k] = mn;
                    s.mean_n2[k] = mn2;
                    for (std::size_t c = 0; c < proj_idx.size(); ++c)
                        if (proj_idx[c] == k) res.projections[c][i] = proj;
                }
            },
            &jumps, &s.diagnostics);
        s.jump_times = std::move(jumps.times);
    });
    return res;
}

MeanSeries reduce_series(const EnsembleResult& r,
                         const std::vector<double> TrajectorySeries::* field) {
    const std::size_t n = r.trajectories.size();
    const std::size_t n_samples = r.times.size();
    if (n == 0) throw std::invalid_argument("reduce_series: empty ensemble");
    MeanSeries out;
    out.mean.assign(n_samples, 0.0);
    out.standard_error.assign(n_samples, 0.0);
    for (std::size_t k = 0; k < n_samples; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& v = r.trajectories[i].*field;
            if (v.size() != n_samples)
                throw std::invalid_argument("reduce_series: series not recorded for this run");
            acc += v[k];
        }
        const double mean = acc / static_cast<double>(n);
        out.mean[k] = mean;
        if (n > 1) {
            double sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = (r.trajectories[i].*field)[k] - mean;
                sq += d * d;
            }
            out.standard_error[k] = std::sqrt(sq / static_cast<double>(n - 1) /
                                              static_cast<double>(n));
        }
    }
    return out;
}

std::vector<double> nonselective_width_series(const EnsembleResult& r) {
    const std::size_t n_samples = r.times.size();
    std::vector<double> out(n_samples);
    std::vector<QuadratureMoments> moments(r.trajectories.size());
    for (std::size_t k = 0; k < n_samples; ++k) {
        for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
            const auto& s = r.trajectories[i];
            moments[i] = QuadratureMoments{s.mean_x[k], s.mean_x2[k], s.mean_p[k], s.mean_p2[k]};
        }
        out[k] = nonselective_width(moments);
    }
    return out;
}

std::vector<double> selective_width_series(const EnsembleResult& r) {
    const auto ms = reduce_series(r, &TrajectorySeries::width);
    return ms.mean;
}

std::vector<double> nonselective_photon_variance_series(const EnsembleResult& r) {
    const auto mn = reduce_series(r, &TrajectorySeries::mean_n);
    const auto mn2 = reduce_series(r, &TrajectorySeries::mean_n2);
    std::vector<double> out(mn.mean.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = std::sqrt(std::max(0.0, mn2.mean[k] - mn.mean[k] * mn.mean[k]));
    return out;
}

std::vector<double> nonselective_mean_photon_series(const EnsembleResult& r) {
    return reduce_series(r, &TrajectorySeries::mean_n).mean;
}

BipartiteDensityMatrix density_at(const EnsembleResult& r, std::size_t k) {
    if (k >= r.projections.size())
        throw std::out_of_range("density_at: no projections stored for this index");
    return accumulate_density(r.projections[k]);
}

std::size_t total_jumps(const EnsembleResult& r) {
    std::size_t n = 0;
    for (const auto& s : r.trajectories) n += s.jump_times.size();
    return n;
}

double spectral_entropy(const std::vector<double>& signal) {
    const std::size_t n = signal.size();
    if (n < 4) throw std::invalid_argument("spectral_entropy: signal too short");
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= static_cast<double>(n);

    // Direct DFT of the mean-subtracted signal over positive frequencies.
    const std::size_t n_freq = n / 2;
    std::vector<double> power(n_freq, 0.0);
    double total = 0.0;
    for (std::size_t k = 1; k <= n_freq; ++k) {
        double re = 0.0, im = 0.0;
        const double w = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double v = signal[j] - mean;
            re += v * std::cos(w * static_cast<double>(j));
            im += v * std::sin(w * static_cast<double>(j));
        }
        power[k - 1] = re * re + im * im;
        total += power[k - 1];
    }
    if (!(total > 0.0)) return 0.0;  // constant signal: no spectral content
    double s = 0.0;
    for (double p : power) {
        const double q = p / total;
        if (q > 0.0) s -= q * std::log(q);
    }
    return s;
}

}  // namespace qchaos
