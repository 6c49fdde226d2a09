// svg.hpp — standalone SVG heatmaps of phase-space distributions.
#pragma once

#include <string>

#include "qchaos/phasespace.hpp"

namespace qchaos {

/** Renders the distribution as an SVG heatmap and writes it to svg_path.
 *
 *  Wigner data gets a diverging palette centered at zero (negative cells are
 *  blue and carry class="neg" so they are machine-checkable); Husimi and
 *  histogram data get a sequential white-to-blue palette.  Axes are labeled
 *  x and p.  Grids larger than 256 cells per axis are block-averaged for
 *  output size. */
void render_heatmap(const std::string& svg_path, const PhaseSpaceDistribution& dist);

}  // namespace qchaos
