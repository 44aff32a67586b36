// SPDX-License-Identifier: Apache-2.0
//
// Static SVG figures: blockage detection per path, scatterer map and
// RMSE-versus-SNR curves.

#pragma once

#include "elaa/bench.hpp"
#include "elaa/extract.hpp"
#include "elaa/synth.hpp"

#include <iosfwd>

namespace elaa
{
    /// One strip per path: estimated visibility over the antenna index, with
    /// the true blocked ranges shaded underneath.
    void write_vr_svg(std::ostream &out, const EstimationResult &est, const VRIndicator &truth);

    /// Array, true and estimated scatterer positions in the (x, y) plane.
    void write_scatter_svg(std::ostream &out, const SceneConfig &scene, const EstimationResult &est);

    /// Location and gain RMSE versus SNR, one curve per method, log y-axis.
    void write_rmse_svg(std::ostream &out, const MCReport &report, const CampaignSpec &spec);
}
