// SPDX-License-Identifier: Apache-2.0
//
// Small helpers shared by the unit tests.

#pragma once

#include "elaa/synth.hpp"

namespace elaa::test
{
    inline CVector random_complex(Rng &rng, Eigen::Index n, double variance = 1.0)
    {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = complex_normal(rng, 0.0, variance);
        return v;
    }

    inline double rel_err(const CVector &a, const CVector &b)
    {
        return (a - b).norm() / b.norm();
    }

    /// A scene with the reference geometry but the noise removed from the data.
    inline ObservationSet noiseless_observation(const SceneConfig &scene, std::uint64_t seed)
    {
        Rng rng(seed);
        ObservationSet obs = synthesize(scene, rng);
        obs.y.data -= obs.noise.data;
        obs.noise.data.setZero();
        return obs;
    }
}
