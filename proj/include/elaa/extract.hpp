// SPDX-License-Identifier: Apache-2.0
//
// Second stage of the estimator: slice the AO output per path, fit
// (d_ue, d, theta) to each steering estimate by maximum likelihood and map the
// scatterers to Cartesian coordinates.

#pragma once

#include "elaa/ao.hpp"
#include "elaa/path_search.hpp"

namespace elaa
{
    struct UnpackedPath
    {
        CMatrix h;     // N x K, column k is h_k^(l)
        CMatrix alpha; // N x T
        RVector b;     // N, first replication
        Complex g{0.0, 0.0};
    };

    std::vector<UnpackedPath> unpack(const AOState &state, const Dims &dims);

    struct PathFit
    {
        double d_ue = 0.0;
        double distance = 1.0;
        double theta = 0.0;
        double residual = 0.0;   // sum_k ||h_hat_k - e^{j phi} h_k||^2
        Complex phase{1.0, 0.0}; // e^{j phi}, folded into the gain
    };

    /// Grid search over (theta, d, d_ue) followed by golden-section polish of
    /// sum_k ||h_hat_k - e^{j phi} h_k(d_ue, d, theta)||^2 with phi profiled out.
    PathFit fit_path(const CMatrix &h_hat, const SteeringDictionary &dict, bool fix_due = false);

    PathFit fit_path(const CMatrix &h_hat, const ArrayGeometry &geom, const OfdmConfig &ofdm, const MleGrid &grid,
                     bool fix_due = false);

    struct PathEstimate
    {
        double theta = 0.0;
        double distance = 1.0;
        double d_ue = 0.0;
        Complex gain{0.0, 0.0};
        RVector b;
        CMatrix alpha;
        double x = 0.0;
        double y = 0.0;
        double residual = 0.0;
    };

    struct EstimationResult
    {
        std::vector<PathEstimate> paths;
        int iterations = 0;
        bool converged = false;
    };

    /// (d cos theta, d sin theta).
    std::pair<double, double> scatterer_position(double d, double theta);

    /// Scatterer positions of every path in `result`.
    std::vector<std::pair<double, double>> positions(const EstimationResult &result);

    /// Unpacks `state` and fits every path; path 0 is the LoS path with d_ue = 0.
    EstimationResult extract(const AOState &state, const Dims &dims, const SteeringDictionary &dict);

    /// Response at the array reference point, g exp(-j 2 pi fc (d + d_ue) / c).
    Complex reference_response(Complex gain, double d, double d_ue, const OfdmConfig &ofdm);
}
