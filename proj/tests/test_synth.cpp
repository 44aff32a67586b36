// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "elaa/oracles.hpp"
#include "elaa/synth.hpp"
#include "support.hpp"

#include <cmath>

using namespace elaa;

TEST_SUITE("synth")
{
    TEST_CASE("reference visibility regions")
    {
        const SceneConfig scene = reference_scene();
        const VRIndicator vr = realize_vr(scene);
        for (int n = 1; n <= 100; ++n)
        {
            CHECK(vr.b(n - 1, 0) == ((n >= 75 && n <= 80) ? 0.0 : 1.0));
            CHECK(vr.b(n - 1, 1) == ((n >= 11 && n <= 14) ? 0.0 : 1.0));
            CHECK(vr.b(n - 1, 2) == ((n >= 34 && n <= 38) ? 0.0 : 1.0));
        }
        CHECK(vr.b.col(1).sum() == 96.0);
    }

    TEST_CASE("empty blockage gives an all-visible indicator")
    {
        SceneConfig scene = reference_scene();
        scene.blockage.assign(scene.paths.size(), {});
        CHECK(realize_vr(scene).b.minCoeff() == 1.0);
    }

    TEST_CASE("expanded indicator round trip")
    {
        const VRIndicator vr = realize_vr(reference_scene());
        const RVector e = vr.expanded(4);
        CHECK(e.size() == 1200);
        CHECK(VRIndicator::from_expanded(e, 100, 3).b == vr.b);
        for (int t = 1; t < 4; ++t)
            CHECK(e.segment(300 * t, 300) == e.head(300));
    }

    TEST_CASE("amplitude moments")
    {
        const SceneConfig scene = reference_scene();
        const VRIndicator vr = realize_vr(scene);
        Rng rng(17);
        double blocked_power = 0.0, blocked_sq = 0.0;
        Complex visible_sum = 0.0;
        long nb = 0, nv = 0;
        while (nb < 100000)
        {
            const SnSField sns = realize_sns(scene, vr, rng);
            for (int t = 0; t < 4; ++t)
                for (int l = 0; l < 3; ++l)
                    for (int n = 0; n < 100; ++n)
                    {
                        const Complex a = sns(n, l, t);
                        if (vr.b(n, l) < 0.5)
                        {
                            blocked_power += std::norm(a);
                            blocked_sq += std::norm(a) * std::norm(a);
                            ++nb;
                        }
                        else
                        {
                            visible_sum += a;
                            ++nv;
                        }
                    }
        }
        const double mean_power = blocked_power / nb;
        const double sd_power = std::sqrt((blocked_sq / nb - mean_power * mean_power) / nb);
        CHECK(std::abs(mean_power - scene.sigma_b2) < 3.0 * sd_power);
        const Complex mean_visible = visible_sum / double(nv);
        const double se = std::sqrt(scene.sigma_v2 / 2.0 / nv);
        CHECK(std::abs(mean_visible.real() - 1.0) < 3.0 * se);
        CHECK(std::abs(mean_visible.imag()) < 3.0 * se);
    }

    TEST_CASE("deterministic limit: tiny amplitude variance")
    {
        SceneConfig scene = reference_scene();
        scene.blockage.assign(scene.paths.size(), {});
        scene.sigma_v2 = 1e-20;
        Rng rng(1);
        const SnSField sns = realize_sns(scene, realize_vr(scene), rng);
        CHECK((sns.alpha.array() - 1.0).abs().maxCoeff() < 1e-8);
    }

    TEST_CASE("single path, unit amplitudes, no noise: y = g h")
    {
        SceneConfig scene = reference_scene();
        scene.paths.resize(1);
        scene.blockage = {{}};
        scene.sigma_v2 = 1e-30;
        scene.sigma_b2 = 1e-30;
        const ObservationSet obs = test::noiseless_observation(scene, 5);
        for (int k = 0; k < 4; ++k)
        {
            const CVector h = steering_vector(scene.geom, scene.ofdm, scene.paths[0], k + 1);
            for (int t = 0; t < 4; ++t)
                for (int n = 0; n < 100; n += 9)
                    CHECK(std::abs(obs.y(n, k, t) - scene.paths[0].gain * h(n)) < 1e-12);
        }
    }

    TEST_CASE("empirical noise power")
    {
        SceneConfig scene = reference_scene();
        for (auto &p : scene.paths)
            p.gain = 0.0;
        scene.noise_variance = 0.37;
        Rng rng(8);
        double power = 0.0;
        long count = 0;
        for (int rep = 0; rep < 50; ++rep)
        {
            const ObservationSet obs = synthesize(scene, rng);
            power += obs.y.data.squaredNorm();
            count += obs.y.data.size();
        }
        // 60000 samples: relative standard error of the power is about 0.4%.
        CHECK(power / count == doctest::Approx(0.37).epsilon(0.02));
    }

    TEST_CASE("signal plus noise decomposes exactly")
    {
        const SceneConfig scene = reference_scene();
        Rng rng(4);
        const ObservationSet obs = synthesize(scene, rng);
        std::vector<CMatrix> steering;
        for (const auto &p : scene.paths)
            steering.push_back(steering_matrix(scene.geom, scene.ofdm, p.distance, p.aoa, p.d_ue));
        const CVector direct = oracle::model(steering, scene.paths, obs.sns.alpha, 4);
        CHECK(test::rel_err(obs.y.data - obs.noise.data, direct) < 1e-13);
    }

    TEST_CASE("SNR scaling")
    {
        const SceneConfig base = reference_scene();
        const double p = mean_signal_power(base);
        CHECK(set_snr(base, 0.0).noise_variance == doctest::Approx(p).epsilon(1e-14));
        CHECK(set_snr(base, 10.0).noise_variance * 10.0 == doctest::Approx(set_snr(base, 0.0).noise_variance).epsilon(1e-14));

        // Brute-force power sum with alpha = b.
        const VRIndicator vr = realize_vr(base);
        std::vector<CMatrix> steering;
        for (const auto &path : base.paths)
            steering.push_back(steering_matrix(base.geom, base.ofdm, path.distance, path.aoa, path.d_ue));
        const CVector y = oracle::model(steering, base.paths, vr.expanded(4).cast<Complex>(), 4);
        const double brute = y.squaredNorm() / y.size();
        CHECK(set_snr(base, 10.0).noise_variance == doctest::Approx(brute / 10.0).epsilon(1e-12));
        CHECK_THROWS_AS(set_snr(base, std::nan("")), InvalidParameter);
    }

    TEST_CASE("scene validation")
    {
        SceneConfig scene = reference_scene();
        scene.paths[0].d_ue = 1.0;
        CHECK_THROWS_AS(scene.validate(), InvalidParameter);
        scene = reference_scene();
        scene.blockage[0] = {{90, 101}};
        CHECK_THROWS_AS(scene.validate(), InvalidParameter);
        scene = reference_scene();
        scene.sigma_v2 = 1.0;
        CHECK_THROWS_AS(scene.validate(), InvalidParameter);
    }
}
