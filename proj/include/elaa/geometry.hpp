// SPDX-License-Identifier: Apache-2.0
//
// Near-field ULA geometry and spherical-wavefront steering vectors.
//
// The array lies on the y-axis with its reference point (the array centre) at
// the origin. A scatterer at distance d and angle theta sits at
// (d cos theta, d sin theta); antenna n (1-based) sits at (0, delta_n * spacing)
// with delta_n = (2n - N - 1) / 2.

#pragma once

#include "elaa/types.hpp"

namespace elaa
{
    struct ArrayGeometry
    {
        int n_antennas = 100;
        double spacing = 0.005; // [m]

        /// Centered index offset of antenna n (1-based), in units of spacing.
        double delta(int n) const { return (2.0 * n - n_antennas - 1.0) / 2.0; }

        /// Aperture D = (N - 1) * spacing [m].
        double aperture() const { return (n_antennas - 1) * spacing; }

        void validate() const;
    };

    struct OfdmConfig
    {
        double carrier = 30e9;           // fc [Hz]
        int n_subcarriers = 4;           // K
        double subcarrier_spacing = 720e3; // delta_f [Hz]
        int n_snapshots = 4;             // T
        double speed_of_light = 3e8;     // c [m/s]

        /// f_k = fc + k * delta_f for k = 1..K.
        double frequency(int k) const { return carrier + k * subcarrier_spacing; }
        double wavelength() const { return speed_of_light / carrier; }

        void validate() const;
    };

    /// Fraunhofer distance 2 D^2 / lambda [m].
    double fraunhofer_distance(const ArrayGeometry &geom, const OfdmConfig &ofdm);

    struct PathParams
    {
        Complex gain{1.0, 0.0};
        double distance = 10.0; // d, scatterer to reference point [m]
        double aoa = 0.0;       // theta [rad]
        double d_ue = 0.0;      // UE to scatterer [m]; 0 for the LoS path

        void validate() const;
    };

    /// Distance between a scatterer at (d, theta) and antenna n (1-based).
    double antenna_distance(const ArrayGeometry &geom, double d, double theta, int n);

    /// Spherical-wavefront response h_k of one path at subcarrier k (1-based).
    /// Entry n is exp(-j 2 pi f_k d_ue / c) * (d / d_n) * exp(-j 2 pi f_k d_n / c).
    CVector steering_vector(const ArrayGeometry &geom, const OfdmConfig &ofdm,
                            double d, double theta, double d_ue, int k);

    inline CVector steering_vector(const ArrayGeometry &geom, const OfdmConfig &ofdm,
                                   const PathParams &path, int k)
    {
        return steering_vector(geom, ofdm, path.distance, path.aoa, path.d_ue, k);
    }

    /// All K steering vectors as the columns of an N x K matrix.
    CMatrix steering_matrix(const ArrayGeometry &geom, const OfdmConfig &ofdm,
                            double d, double theta, double d_ue);

    /// Stacked h vector (length NLK, order n + N*(l + L*k)) for a set of paths.
    CVector stacked_steering(const ArrayGeometry &geom, const OfdmConfig &ofdm,
                             const std::vector<PathParams> &paths);
}
