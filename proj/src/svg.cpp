#include "qchaos/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qchaos {
namespace {

struct Rgb {
    int r, g, b;
};

Rgb lerp(const Rgb& a, const Rgb& b, double s) {
    s = std::clamp(s, 0.0, 1.0);
    auto mix = [s](int u, int v) { return static_cast<int>(std::lround(u + s * (v - u))); };
    return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlue{33, 102, 172};    // negative half of the diverging palette
constexpr Rgb kRed{178, 24, 43};      // positive half
constexpr Rgb kSeqDark{8, 48, 107};   // sequential palette endpoint

// Block-averages values to at most max_cells per axis; axes keep min/max.
Eigen::MatrixXd downsample(const Eigen::MatrixXd& v, int max_cells) {
    const auto rows = v.rows(), cols = v.cols();
    if (rows <= max_cells && cols <= max_cells) return v;
    const auto bi = (rows + max_cells - 1) / max_cells;
    const auto bj = (cols + max_cells - 1) / max_cells;
    const auto nr = (rows + bi - 1) / bi, nc = (cols + bj - 1) / bj;
    Eigen::MatrixXd out(nr, nc);
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index j = 0; j < nc; ++j) {
            const auto r0 = i * bi, c0 = j * bj;
            const auto nb_r = std::min(bi, rows - r0), nb_c = std::min(bj, cols - c0);
            out(i, j) = v.block(r0, c0, nb_r, nb_c).mean();
        }
    return out;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

void render_heatmap(const std::string& svg_path, const PhaseSpaceDistribution& dist) {
    if (dist.values.rows() != dist.x_axis.size() || dist.values.cols() != dist.p_axis.size() ||
        dist.values.size() == 0)
        throw std::invalid_argument("render_heatmap: empty or inconsistent distribution");

    const Eigen::MatrixXd vals = downsample(dist.values, 256);
    const auto nx = vals.rows(), np = vals.cols();
    const bool diverging = dist.kind == DistributionKind::wigner;
    double vmax = diverging ? vals.cwiseAbs().maxCoeff() : std::max(vals.maxCoeff(), 0.0);
    if (vmax <= 0) vmax = 1.0;

    const double plot_w = 560.0, plot_h = 560.0;
    const double left = 64.0, top = 40.0, bottom = 48.0, right = 16.0;
    const double width = left + plot_w + right, height = top + plot_h + bottom;
    const double cw = plot_w / static_cast<double>(nx);
    const double ch = plot_h / static_cast<double>(np);

    std::ofstream f(svg_path);
    if (!f) throw std::runtime_error("cannot open for writing: " + svg_path);
    char buf[256];
    f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                  "viewBox=\"0 0 %g %g\">\n",
                  width, height, width, height);
    f << buf;
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const char* kind = diverging ? "Wigner"
                       : dist.kind == DistributionKind::husimi ? "Husimi"
                                                               : "histogram";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
                  "text-anchor=\"middle\">%s, t = %.6g</text>\n",
                  left + plot_w / 2, kind, dist.t);
    f << buf;

    // Cells: x ascending to the right, p ascending upward.
    for (Eigen::Index i = 0; i < nx; ++i) {
        for (Eigen::Index j = 0; j < np; ++j) {
            const double v = vals(i, j);
            Rgb c;
            bool neg = false;
            if (diverging) {
                neg = v < 0;
                c = neg ? lerp(kWhite, kBlue, -v / vmax) : lerp(kWhite, kRed, v / vmax);
            } else {
                c = lerp(kWhite, kSeqDark, std::max(v, 0.0) / vmax);
            }
            const double px = left + cw * static_cast<double>(i);
            const double py = top + plot_h - ch * static_cast<double>(j + 1);
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                          "fill=\"%s\"%s/>\n",
                          px, py, cw + 0.05, ch + 0.05, hex(c).c_str(),
                          neg ? " class=\"neg\"" : "");
            f << buf;
        }
    }

    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  left, top, plot_w, plot_h);
    f << buf;

    // Ticks: ends and center of each axis.
    const double xs[3] = {dist.x_axis(0), dist.x_axis(dist.x_axis.size() / 2),
                          dist.x_axis(dist.x_axis.size() - 1)};
    const double ps[3] = {dist.p_axis(0), dist.p_axis(dist.p_axis.size() / 2),
                          dist.p_axis(dist.p_axis.size() - 1)};
    for (int k = 0; k < 3; ++k) {
        const double tx = left + plot_w * (0.5 * k);
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\" "
                      "text-anchor=\"middle\">%s</text>\n",
                      tx, top + plot_h + 18, tick_label(xs[k]).c_str());
        f << buf;
        const double ty = top + plot_h * (1.0 - 0.5 * k);
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\" "
                      "text-anchor=\"end\">%s</text>\n",
                      left - 6, ty + 4, tick_label(ps[k]).c_str());
        f << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"14\" "
                  "text-anchor=\"middle\">x</text>\n",
                  left + plot_w / 2, top + plot_h + 40);
    f << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"14\" "
                  "text-anchor=\"middle\">p</text>\n",
                  18.0, top + plot_h / 2);
    f << buf;

    f << "</svg>\n";
    if (!f) throw std::runtime_error("write failed: " + svg_path);
}

}  // namespace qchaos
