// SPDX-License-Identifier: Apache-2.0

#include "elaa/geometry.hpp"

#include <cmath>

namespace elaa
{
    void ArrayGeometry::validate() const
    {
        if (n_antennas < 2)
            throw InvalidParameter("ArrayGeometry: at least two antennas are required");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw InvalidParameter("ArrayGeometry: element spacing must be positive");
    }

    void OfdmConfig::validate() const
    {
        if (!(carrier > 0.0))
            throw InvalidParameter("OfdmConfig: carrier frequency must be positive");
        if (n_subcarriers < 1 || n_snapshots < 1)
            throw InvalidParameter("OfdmConfig: need at least one subcarrier and one snapshot");
        if (!(subcarrier_spacing > 0.0))
            throw InvalidParameter("OfdmConfig: subcarrier spacing must be positive");
        if (!(speed_of_light > 0.0))
            throw InvalidParameter("OfdmConfig: speed of light must be positive");
    }

    double fraunhofer_distance(const ArrayGeometry &geom, const OfdmConfig &ofdm)
    {
        const double D = geom.aperture();
        return 2.0 * D * D / ofdm.wavelength();
    }

    void PathParams::validate() const
    {
        if (!(distance > 0.0) || !std::isfinite(distance))
            throw InvalidParameter("PathParams: distance must be positive");
        if (!(std::abs(aoa) < kPi / 2.0))
            throw InvalidParameter("PathParams: angle of arrival must lie in (-pi/2, pi/2)");
        if (!(d_ue >= 0.0) || !std::isfinite(d_ue))
            throw InvalidParameter("PathParams: UE-to-scatterer distance must be non-negative");
    }

    double antenna_distance(const ArrayGeometry &geom, double d, double theta, int n)
    {
        if (!(d > 0.0))
            throw InvalidParameter("antenna_distance: distance must be positive");
        if (n < 1 || n > geom.n_antennas)
            throw InvalidParameter("antenna_distance: antenna index out of range");
        const double offset = geom.delta(n) * geom.spacing;
        return std::sqrt(d * d - 2.0 * d * offset * std::sin(theta) + offset * offset);
    }

    CVector steering_vector(const ArrayGeometry &geom, const OfdmConfig &ofdm,
                            double d, double theta, double d_ue, int k)
    {
        if (k < 1 || k > ofdm.n_subcarriers)
            throw InvalidParameter("steering_vector: subcarrier index out of range");
        const double fk = ofdm.frequency(k);
        const double c = ofdm.speed_of_light;
        const Complex common = std::polar(1.0, -kTwoPi * fk * d_ue / c);

        CVector h(geom.n_antennas);
        for (int n = 1; n <= geom.n_antennas; ++n)
        {
            const double dn = antenna_distance(geom, d, theta, n);
            h(n - 1) = common * std::polar(d / dn, -kTwoPi * fk * dn / c);
        }
        return h;
    }

    CMatrix steering_matrix(const ArrayGeometry &geom, const OfdmConfig &ofdm,
                            double d, double theta, double d_ue)
    {
        CMatrix H(geom.n_antennas, ofdm.n_subcarriers);
        for (int k = 1; k <= ofdm.n_subcarriers; ++k)
            H.col(k - 1) = steering_vector(geom, ofdm, d, theta, d_ue, k);
        return H;
    }

    CVector stacked_steering(const ArrayGeometry &geom, const OfdmConfig &ofdm,
                             const std::vector<PathParams> &paths)
    {
        const Eigen::Index N = geom.n_antennas;
        const Eigen::Index L = static_cast<Eigen::Index>(paths.size());
        CVector h(N * L * ofdm.n_subcarriers);
        for (Eigen::Index l = 0; l < L; ++l)
        {
            const CMatrix H = steering_matrix(geom, ofdm, paths[l].distance, paths[l].aoa, paths[l].d_ue);
            for (int k = 0; k < ofdm.n_subcarriers; ++k)
                h.segment(N * (l + L * k), N) = H.col(k);
        }
        return h;
    }
}
