// grid.hpp — uniform position-quadrature grid for the spectral propagator.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qchaos {

/** Symmetric uniform grid x_j = x_min + j*dx, j = 0..n-1, with the matching
 *  FFT momentum grid k_j (standard DFT ordering).  n must be a power of two
 *  (>= 8) so the split-operator transforms stay exact and fast. */
struct QuadratureGrid {
    int n_points = 1024;
    double x_min = -20.0;
    double x_max = 20.0;

    QuadratureGrid() = default;
    QuadratureGrid(int n, double lo, double hi) : n_points(n), x_min(lo), x_max(hi) { validate(); }

    void validate() const {
        if (n_points < 8 || (n_points & (n_points - 1)) != 0)
            throw std::invalid_argument("QuadratureGrid: n_points must be a power of two >= 8");
        if (!(x_max > x_min)) throw std::invalid_argument("QuadratureGrid: x_max must exceed x_min");
        if (std::abs(x_min + x_max) > 1e-9 * (x_max - x_min))
            throw std::invalid_argument("QuadratureGrid: grid must be symmetric about 0");
    }

    double dx() const { return (x_max - x_min) / n_points; }
    double x(int j) const { return x_min + dx() * j; }
    // FFT-ordered momentum: k_j for j < n/2 is 2*pi*j/(n*dx), then negative branch.
    double k(int j) const {
        const double dk = 2.0 * M_PI / (n_points * dx());
        const int jj = (j < n_points / 2) ? j : j - n_points;
        return dk * jj;
    }
    std::vector<double> x_values() const {
        std::vector<double> v(n_points);
        for (int j = 0; j < n_points; ++j) v[j] = x(j);
        return v;
    }

    bool operator==(const QuadratureGrid&) const = default;
};

}  // namespace qchaos
