// SPDX-License-Identifier: Apache-2.0

#include "elaa/extract.hpp"

#include <cmath>
#include <tuple>

namespace elaa
{
    std::vector<UnpackedPath> unpack(const AOState &state, const Dims &d)
    {
        d.validate();
        if (state.g.size() != d.L() || state.h.size() != d.nlk() || state.alpha.size() != d.nlt() ||
            state.b.size() != d.nlt())
            throw InvalidParameter("unpack: state does not match the dimensions");

        std::vector<UnpackedPath> out(static_cast<std::size_t>(d.L()));
        for (int l = 0; l < d.L(); ++l)
        {
            UnpackedPath &p = out[static_cast<std::size_t>(l)];
            p.g = state.g(l);
            p.h.resize(d.N(), d.K());
            for (int k = 0; k < d.K(); ++k)
                p.h.col(k) = state.h.segment(h_index(d, 0, l, k), d.N());
            p.alpha.resize(d.N(), d.T());
            for (int t = 0; t < d.T(); ++t)
                p.alpha.col(t) = state.alpha.segment(alpha_index(d, 0, l, t), d.N());
            p.b = state.b.segment(alpha_index(d, 0, l, 0), d.N());
        }
        return out;
    }

    PathFit fit_path(const CMatrix &h_hat, const SteeringDictionary &dict, bool fix_due)
    {
        const MleGrid &grid = dict.grid();
        const PathData data = PathData::from_response(h_hat);
        const std::vector<double> dues = fix_due ? std::vector<double>{0.0} : grid.dues();
        const PathPoint coarse = coarse_search(dict, data, FitCriterion::UnitModulus, dues);

        PolishBox box;
        box.theta_half = grid.theta_step;
        box.d_rel = grid.d_points > 1
                        ? (grid.d_log ? std::pow(grid.d_max / grid.d_min, 1.0 / (grid.d_points - 1)) - 1.0
                                      : (grid.d_max - grid.d_min) / (grid.d_points - 1) / coarse.distance)
                        : 0.01;
        box.due_half = grid.due_step;
        box.due_min = grid.due_min;
        box.due_max = grid.due_max;
        box.fix_due = fix_due;
        box.sweeps = grid.polish_sweeps;
        box.tol = grid.polish_tol;
        const PathPoint best = polish(dict.geometry(), dict.ofdm(), data, FitCriterion::UnitModulus, coarse, box);

        PathFit fit;
        fit.d_ue = best.d_ue;
        fit.distance = best.distance;
        fit.theta = best.theta;
        fit.residual = best.loss;
        fit.phase = best.gain(FitCriterion::UnitModulus);
        return fit;
    }

    PathFit fit_path(const CMatrix &h_hat, const ArrayGeometry &geom, const OfdmConfig &ofdm, const MleGrid &grid,
                     bool fix_due)
    {
        const SteeringDictionary dict(geom, ofdm, grid);
        return fit_path(h_hat, dict, fix_due);
    }

    std::pair<double, double> scatterer_position(double d, double theta)
    {
        return {d * std::cos(theta), d * std::sin(theta)};
    }

    std::vector<std::pair<double, double>> positions(const EstimationResult &result)
    {
        std::vector<std::pair<double, double>> out;
        for (const auto &p : result.paths)
            out.push_back(scatterer_position(p.distance, p.theta));
        return out;
    }

    EstimationResult extract(const AOState &state, const Dims &dims, const SteeringDictionary &dict)
    {
        const std::vector<UnpackedPath> parts = unpack(state, dims);
        EstimationResult result;
        result.iterations = state.iterations;
        result.converged = state.converged;
        for (std::size_t l = 0; l < parts.size(); ++l)
        {
            const UnpackedPath &u = parts[l];
            const PathFit fit = fit_path(u.h, dict, l == 0);
            PathEstimate e;
            e.theta = fit.theta;
            e.distance = fit.distance;
            e.d_ue = fit.d_ue;
            e.gain = u.g * fit.phase;
            e.b = u.b;
            e.alpha = u.alpha;
            e.residual = fit.residual;
            std::tie(e.x, e.y) = scatterer_position(e.distance, e.theta);
            result.paths.push_back(std::move(e));
        }
        return result;
    }

    Complex reference_response(Complex gain, double d, double d_ue, const OfdmConfig &ofdm)
    {
        return gain * std::polar(1.0, -kTwoPi * ofdm.carrier * (d + d_ue) / ofdm.speed_of_light);
    }
}
