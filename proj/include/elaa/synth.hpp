// SPDX-License-Identifier: Apache-2.0
//
// Ground-truth scenes and noisy observations of a partially blocked ELAA.

#pragma once

#include "elaa/geometry.hpp"
#include "elaa/stacking.hpp"

#include <random>

namespace elaa
{
    using Rng = std::mt19937_64;

    /// Inclusive 1-based antenna index range.
    struct BlockRange
    {
        int first = 1;
        int last = 1;
    };

    struct SceneConfig
    {
        ArrayGeometry geom;
        OfdmConfig ofdm;
        std::vector<PathParams> paths;
        std::vector<std::vector<BlockRange>> blockage; // one list per path
        double noise_variance = 1e-2;                  // sigma_n^2
        double sigma_b2 = 1e-2;                        // amplitude variance inside a blockage
        double sigma_v2 = 1e-4;                        // amplitude variance inside the VR
        std::uint64_t seed = 1;

        Dims dims() const
        {
            return {geom.n_antennas, ofdm.n_subcarriers, ofdm.n_snapshots, static_cast<int>(paths.size())};
        }

        /// Throws InvalidParameter on any violated invariant.
        void validate() const;
    };

    /// Binary visibility b(n,l); 1 means antenna n sees path l.
    struct VRIndicator
    {
        RMatrix b; // N x L

        /// 1_T (x) vec(b): length NLT, order n + N*(l + L*t).
        RVector expanded(int n_snapshots) const;

        /// First replication of an expanded vector, reshaped to N x L.
        static VRIndicator from_expanded(const RVector &b_exp, int n_antennas, int n_paths);
    };

    struct ObservationSet
    {
        SceneConfig scene;
        ObservationTensor y;
        SnSField sns;
        VRIndicator vr;
        ObservationTensor noise;
    };

    /// Draws one CN(mean, variance) sample; variance is split evenly over re/im.
    Complex complex_normal(Rng &rng, Complex mean, double variance);

    /// b(n,l) = 0 on the configured blocked ranges, 1 elsewhere.
    VRIndicator realize_vr(const SceneConfig &scene);

    /// alpha ~ CN(1, sigma_v2) where visible, CN(0, sigma_b2) where blocked;
    /// independent across (n, l, t).
    SnSField realize_sns(const SceneConfig &scene, const VRIndicator &vr, Rng &rng);

    /// y_{k,t} = sum_l g_l alpha_t^(l) . h_k^(l) + n_{k,t}, n ~ CN(0, sigma_n^2 I).
    ObservationSet synthesize(const SceneConfig &scene, Rng &rng);

    /// Convenience overload seeded from scene.seed.
    ObservationSet synthesize(const SceneConfig &scene);

    /// Mean per-sample power of the noiseless signal over all NKT samples with
    /// the amplitudes at their conditional means (alpha = b).
    double mean_signal_power(const SceneConfig &scene);

    /// Returns a copy of `scene` with sigma_n^2 = mean_signal_power / 10^(snr_db/10).
    SceneConfig set_snr(const SceneConfig &scene, double snr_db);

    /// The three-path scene of the reference experiment (N = 100, fc = 30 GHz,
    /// K = T = 4, 2.88 MHz bandwidth).
    SceneConfig reference_scene();
}
