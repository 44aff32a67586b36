// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "elaa/extract.hpp"
#include "support.hpp"

#include <cmath>

using namespace elaa;

namespace
{
    const SteeringDictionary &reference_dictionary()
    {
        static const SteeringDictionary dict(reference_scene().geom, reference_scene().ofdm, MleGrid{});
        return dict;
    }

    double direct_residual(const CMatrix &h_hat, const ArrayGeometry &geom, const OfdmConfig &ofdm,
                           const PathFit &fit)
    {
        const CMatrix h = steering_matrix(geom, ofdm, fit.distance, fit.theta, fit.d_ue);
        return (h_hat - fit.phase * h).squaredNorm();
    }
}

TEST_SUITE("extract")
{
    TEST_CASE("unpack slices h, alpha and b per path")
    {
        const Dims d{3, 2, 2, 2};
        Rng rng(1);
        AOState s;
        s.dims = d;
        s.g = test::random_complex(rng, 2);
        s.h = test::random_complex(rng, d.nlk());
        s.alpha = test::random_complex(rng, d.nlt());
        s.b = RVector::Ones(d.nlt());
        s.b(alpha_index(d, 1, 1, 0)) = 0.0;
        s.b(alpha_index(d, 1, 1, 1)) = 0.0;
        const auto parts = unpack(s, d);
        REQUIRE(parts.size() == 2);
        for (int l = 0; l < 2; ++l)
        {
            CHECK(parts[l].g == s.g(l));
            for (int n = 0; n < 3; ++n)
            {
                for (int k = 0; k < 2; ++k)
                    CHECK(parts[l].h(n, k) == s.h(h_index(d, n, l, k)));
                for (int t = 0; t < 2; ++t)
                    CHECK(parts[l].alpha(n, t) == s.alpha(alpha_index(d, n, l, t)));
            }
        }
        CHECK(parts[0].b == RVector::Ones(3));
        CHECK(parts[1].b == (RVector(3) << 1, 0, 1).finished());
    }

    TEST_CASE("on-grid steering matrix is fitted exactly")
    {
        const SteeringDictionary &dict = reference_dictionary();
        const SceneConfig scene = reference_scene();
        const double theta = dict.thetas()[70]; // 10 degrees
        const double d = dict.distances()[60];
        const double d_ue = 3.25;
        const CMatrix h_hat =
            std::polar(1.0, 0.7) * steering_matrix(scene.geom, scene.ofdm, d, theta, d_ue);
        const PathFit fit = fit_path(h_hat, dict);
        CHECK(fit.residual < 1e-10 * h_hat.squaredNorm());
        CHECK(fit.theta == doctest::Approx(theta).epsilon(1e-6));
        CHECK(fit.distance == doctest::Approx(d).epsilon(1e-6));
        // Only the total phase e^{j(0.7 - 2 pi f (d_ue) / c)} is identifiable
        // through the subcarrier slope; d_ue itself is resolved to the
        // subcarrier ambiguity c / delta_f = 417 m, far outside the grid.
        CHECK(fit.d_ue == doctest::Approx(d_ue).epsilon(1e-4));
    }

    TEST_CASE("off-grid scatterer: polishing beats the grid")
    {
        const SceneConfig scene = reference_scene();
        MleGrid coarse_only;
        coarse_only.polish_sweeps = 0;
        const SteeringDictionary grid_dict(scene.geom, scene.ofdm, coarse_only);
        const SteeringDictionary &dict = reference_dictionary();

        const double theta = deg2rad(-17.37), d = 8.123, d_ue = 5.11;
        const CMatrix h_hat = steering_matrix(scene.geom, scene.ofdm, d, theta, d_ue);
        const PathFit grid_fit = fit_path(h_hat, grid_dict);
        const PathFit fit = fit_path(h_hat, dict);
        CHECK(fit.residual < grid_fit.residual);
        const auto [x, y] = scatterer_position(fit.distance, fit.theta);
        const auto [xt, yt] = scatterer_position(d, theta);
        CHECK(std::hypot(x - xt, y - yt) < 1e-3);
        CHECK(fit.d_ue == doctest::Approx(d_ue).epsilon(1e-3));
    }

    TEST_CASE("Cartesian positions")
    {
        auto [x1, y1] = scatterer_position(10.0, deg2rad(15.0));
        CHECK(x1 == doctest::Approx(9.659258).epsilon(1e-6));
        CHECK(y1 == doctest::Approx(2.588190).epsilon(1e-6));
        auto [x2, y2] = scatterer_position(7.0, deg2rad(-25.0));
        CHECK(x2 == doctest::Approx(6.344155).epsilon(1e-6));
        CHECK(y2 == doctest::Approx(-2.958327).epsilon(1e-6));
        auto [x3, y3] = scatterer_position(6.0, 0.0);
        CHECK(x3 == 6.0);
        CHECK(y3 == 0.0);
    }

    TEST_CASE("reported residual equals the direct misfit; the fit is a local minimum")
    {
        const SceneConfig scene = reference_scene();
        Rng rng(4);
        const CMatrix clean = steering_matrix(scene.geom, scene.ofdm, 6.3, deg2rad(47.2), 6.0);
        CMatrix h_hat = clean;
        for (Eigen::Index k = 0; k < h_hat.cols(); ++k)
            h_hat.col(k) += test::random_complex(rng, h_hat.rows(), 0.01);
        const PathFit fit = fit_path(h_hat, reference_dictionary());
        CHECK(fit.residual == doctest::Approx(direct_residual(h_hat, scene.geom, scene.ofdm, fit)).epsilon(1e-12));
        CHECK(std::abs(std::abs(fit.phase) - 1.0) < 1e-12);

        // Small steps along any coordinate cannot lower the residual beyond the
        // golden-section tolerance.
        const double steps[3] = {1e-5, 1e-5, 1e-4};
        for (int c = 0; c < 3; ++c)
            for (double sign : {-1.0, 1.0})
            {
                PathFit moved = fit;
                (c == 0 ? moved.theta : c == 1 ? moved.distance : moved.d_ue) += sign * steps[c];
                const CMatrix h = steering_matrix(scene.geom, scene.ofdm, moved.distance, moved.theta, moved.d_ue);
                // Re-profile the phase at the moved point.
                Complex w = 0.0;
                for (Eigen::Index k = 0; k < h.cols(); ++k)
                    w += h.col(k).dot(h_hat.col(k));
                moved.phase = w / std::abs(w);
                CHECK(direct_residual(h_hat, scene.geom, scene.ofdm, moved) >= fit.residual * (1.0 - 1e-7));
            }
    }

    TEST_CASE("extract from the true state")
    {
        const SceneConfig scene = reference_scene();
        const ObservationSet obs = test::noiseless_observation(scene, 2);
        AOState s = state_from_truth(obs);
        s.iterations = 4;
        s.converged = true;
        const EstimationResult est = extract(s, scene.dims(), reference_dictionary());
        REQUIRE(est.paths.size() == 3);
        CHECK(est.iterations == 4);
        CHECK(est.paths[0].d_ue == 0.0);
        const auto pos = positions(est);
        for (int l = 0; l < 3; ++l)
        {
            const auto [xt, yt] = scatterer_position(scene.paths[l].distance, scene.paths[l].aoa);
            CHECK(std::hypot(pos[l].first - xt, pos[l].second - yt) < 1e-4);
            CHECK(std::abs(est.paths[l].gain - scene.paths[l].gain) < 1e-3);
            CHECK(est.paths[l].b == obs.vr.b.col(l));
        }
    }

    TEST_CASE("reference-point response")
    {
        OfdmConfig ofdm;
        const Complex g(0.3, -0.4);
        const Complex r = reference_response(g, 10.0, 2.0, ofdm);
        CHECK(std::abs(r) == doctest::Approx(0.5));
        // 12 m at 1 cm wavelength is a whole number of cycles.
        CHECK(std::abs(r - g) < 1e-9);
    }
}
