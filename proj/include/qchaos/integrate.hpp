// integrate.hpp — adaptive embedded Runge-Kutta (Dormand-Prince 5(4)).
//
// Templated over any Eigen-style state (fixed vectors, dynamic complex
// matrices).  Error control targets local error per unit step relative to
// max(1, |y|_rms).  Used by the semiclassical EOM and the Fock-basis
// Lindblad propagator alike.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qchaos {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrateOptions {
    double tol = 1e-9;        // local error per unit step (scaled)
    double h_init = 1e-3;
    double h_max = 0.25;
    double h_min_factor = 1e-12;  // underflow threshold relative to |t|
};

template <class State>
double rms_norm(const State& s) {
    return std::sqrt(s.squaredNorm() / static_cast<double>(s.size()));
}

/**
 * Advances y from t0 to t1.  rhs has signature rhs(t, y, dydt).
 * post_accept, if given, may project the state after every accepted step
 * (e.g. Bloch-vector renormalization).  Throws IntegrationError if the step
 * size underflows.
 */
template <class State, class Rhs>
void integrate_adaptive(const Rhs& rhs, State& y, double t0, double t1,
                        const IntegrateOptions& opts = {},
                        const std::function<void(State&)>& post_accept = nullptr) {
    if (t1 <= t0) return;

    // Dormand-Prince 5(4) tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - bhat, for the embedded 4th-order error estimate.
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y;
    State ytmp = y, ynew = y, err = y;

    double t = t0;
    double h = std::min({opts.h_init, opts.h_max, t1 - t0});
    rhs(t, y, k1);
    bool k1_fresh = true;

    while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
        h = std::min(h, t1 - t);
        const double h_min = opts.h_min_factor * std::max(1.0, std::abs(t));
        if (h < h_min) {
            throw IntegrationError("integrate_adaptive: step size underflow (h=" + std::to_string(h) +
                                   " at t=" + std::to_string(t) + ")");
        }
        if (!k1_fresh) {
            rhs(t, y, k1);
            k1_fresh = true;
        }
        ytmp = y + (h * a21) * k1;
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + (h * a31) * k1 + (h * a32) * k2;
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3;
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4;
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 + (h * a64) * k4 + (h * a65) * k5;
        rhs(t + h, ytmp, k6);
        ynew = y + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 + (h * b6) * k6;
        rhs(t + h, ynew, k7);  // FSAL stage
        err = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 + (h * e6) * k6 + (h * e7) * k7;

        const double scale = std::max(1.0, std::max(rms_norm(y), rms_norm(ynew)));
        const double err_norm = rms_norm(err);
        const double tol_eff = opts.tol * h * scale;
        if (err_norm <= tol_eff) {
            t += h;
            y = ynew;
            k1 = k7;  // first-same-as-last
            if (post_accept) {
                post_accept(y);
                k1_fresh = false;  // state may have been projected
            }
        } else {
            k1_fresh = true;  // k1 still matches y; cheap to keep
        }
        const double grow = (err_norm > 0.0) ? 0.9 * std::pow(tol_eff / err_norm, 0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        h = std::min(h, opts.h_max);
    }
}

/**
 * Integrates through an increasing list of sample times, invoking
 * visit(index, t, y) at each (including t0 if listed).
 */
template <class State, class Rhs, class Visitor>
void integrate_sampled(const Rhs& rhs, State& y, double t0, const std::vector<double>& times,
                       const Visitor& visit, const IntegrateOptions& opts = {},
                       const std::function<void(State&)>& post_accept = nullptr) {
    double t = t0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > t + 1e-14) {
            integrate_adaptive(rhs, y, t, times[i], opts, post_accept);
            t = times[i];
        }
        visit(i, times[i], y);
    }
}

}  // namespace qchaos
