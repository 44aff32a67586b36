// SPDX-License-Identifier: Apache-2.0

#include "elaa/synth.hpp"

#include <cmath>

namespace elaa
{
    void SceneConfig::validate() const
    {
        geom.validate();
        ofdm.validate();
        if (paths.empty())
            throw InvalidParameter("SceneConfig: at least one path is required");
        for (const auto &p : paths)
            p.validate();
        if (paths.front().d_ue != 0.0)
            throw InvalidParameter("SceneConfig: the LoS path (index 0) must have d_ue = 0");
        if (!blockage.empty() && blockage.size() != paths.size())
            throw InvalidParameter("SceneConfig: blockage list must have one entry per path");
        for (const auto &ranges : blockage)
            for (const auto &r : ranges)
                if (r.first < 1 || r.last > geom.n_antennas || r.first > r.last)
                    throw InvalidParameter("SceneConfig: blockage range outside 1..N");
        if (!(noise_variance > 0.0) || !(sigma_b2 > 0.0) || !(sigma_v2 > 0.0))
            throw InvalidParameter("SceneConfig: variances must be positive");
        if (sigma_v2 > sigma_b2)
            throw InvalidParameter("SceneConfig: sigma_v2 must not exceed sigma_b2");
    }

    RVector VRIndicator::expanded(int n_snapshots) const
    {
        const Eigen::Index nl = b.size();
        RVector out(nl * n_snapshots);
        const Eigen::Map<const RVector> flat(b.data(), nl); // column-major: n + N*l
        for (int t = 0; t < n_snapshots; ++t)
            out.segment(nl * t, nl) = flat;
        return out;
    }

    VRIndicator VRIndicator::from_expanded(const RVector &b_exp, int n_antennas, int n_paths)
    {
        const Eigen::Index nl = Eigen::Index(n_antennas) * n_paths;
        if (b_exp.size() < nl)
            throw InvalidParameter("VRIndicator::from_expanded: vector too short");
        VRIndicator vr;
        vr.b = Eigen::Map<const RMatrix>(b_exp.data(), n_antennas, n_paths);
        return vr;
    }

    Complex complex_normal(Rng &rng, Complex mean, double variance)
    {
        std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
        const double re = gauss(rng);
        const double im = gauss(rng);
        return mean + Complex(re, im);
    }

    VRIndicator realize_vr(const SceneConfig &scene)
    {
        const int N = scene.geom.n_antennas;
        const int L = static_cast<int>(scene.paths.size());
        VRIndicator vr;
        vr.b = RMatrix::Ones(N, L);
        for (int l = 0; l < L && l < static_cast<int>(scene.blockage.size()); ++l)
            for (const auto &r : scene.blockage[l])
                for (int n = r.first; n <= r.last; ++n)
                    vr.b(n - 1, l) = 0.0;
        return vr;
    }

    SnSField realize_sns(const SceneConfig &scene, const VRIndicator &vr, Rng &rng)
    {
        const Dims d = scene.dims();
        SnSField sns{d, CVector(d.nlt())};
        for (int t = 0; t < d.T(); ++t)
            for (int l = 0; l < d.L(); ++l)
                for (int n = 0; n < d.N(); ++n)
                {
                    const bool visible = vr.b(n, l) > 0.5;
                    sns.alpha(alpha_index(d, n, l, t)) =
                        visible ? complex_normal(rng, 1.0, scene.sigma_v2) : complex_normal(rng, 0.0, scene.sigma_b2);
                }
        return sns;
    }

    ObservationSet synthesize(const SceneConfig &scene, Rng &rng)
    {
        scene.validate();
        const Dims d = scene.dims();

        ObservationSet obs;
        obs.scene = scene;
        obs.vr = realize_vr(scene);
        obs.sns = realize_sns(scene, obs.vr, rng);

        CVector g(d.L());
        for (int l = 0; l < d.L(); ++l)
            g(l) = scene.paths[l].gain;
        const CVector h = stacked_steering(scene.geom, scene.ofdm, scene.paths);
        obs.y = model_tensor(d, g, h, obs.sns.alpha);

        obs.noise = ObservationTensor{d, CVector(d.nkt())};
        for (Eigen::Index i = 0; i < d.nkt(); ++i)
            obs.noise.data(i) = complex_normal(rng, 0.0, scene.noise_variance);
        obs.y.data += obs.noise.data;
        return obs;
    }

    ObservationSet synthesize(const SceneConfig &scene)
    {
        Rng rng(scene.seed);
        return synthesize(scene, rng);
    }

    double mean_signal_power(const SceneConfig &scene)
    {
        const Dims d = scene.dims();
        const VRIndicator vr = realize_vr(scene);
        const RVector b = vr.expanded(d.T());
        CVector g(d.L());
        for (int l = 0; l < d.L(); ++l)
            g(l) = scene.paths[l].gain;
        const CVector h = stacked_steering(scene.geom, scene.ofdm, scene.paths);
        const ObservationTensor x = model_tensor(d, g, h, b.cast<Complex>());
        return x.data.squaredNorm() / static_cast<double>(d.nkt());
    }

    SceneConfig set_snr(const SceneConfig &scene, double snr_db)
    {
        if (!std::isfinite(snr_db))
            throw InvalidParameter("set_snr: SNR must be finite");
        const double power = mean_signal_power(scene);
        if (!(power > 0.0))
            throw InvalidParameter("set_snr: scene has zero signal power");
        SceneConfig out = scene;
        out.noise_variance = power / std::pow(10.0, snr_db / 10.0);
        return out;
    }

    SceneConfig reference_scene()
    {
        SceneConfig s;
        s.geom.n_antennas = 100;
        s.geom.spacing = 0.005;
        s.ofdm.carrier = 30e9;
        s.ofdm.n_subcarriers = 4;
        s.ofdm.subcarrier_spacing = 2.88e6 / 4.0;
        s.ofdm.n_snapshots = 4;
        s.ofdm.speed_of_light = 3e8;

        // NLoS d_ue values are the UE-to-scatterer distances implied by the
        // UE at (10 m, 15 deg); NLoS gains follow a 1/length spreading loss with
        // a 0.7 reflection magnitude.
        s.paths = {
            {Complex(1.0, 0.0), 10.0, deg2rad(15.0), 0.0},
            {std::polar(0.58, 2.0), 6.0, deg2rad(50.0), 6.140175460466987},
            {std::polar(0.52, -1.0), 7.0, deg2rad(-25.0), 6.4617163326273515},
        };
        s.blockage = {{{75, 80}}, {{11, 14}}, {{34, 38}}};
        s.sigma_b2 = 1e-2;
        s.sigma_v2 = 1e-4;
        s.seed = 1;
        s.noise_variance = 1.0;
        return set_snr(s, 10.0);
    }
}
