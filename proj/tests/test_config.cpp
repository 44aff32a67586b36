// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "elaa/config.hpp"

#include <sstream>

using namespace elaa;

namespace
{
    const std::string kDefaultConf = std::string(ELAA_SOURCE_DIR) + "/configs/default.conf";

    RunConfig parse(const std::string &text)
    {
        std::istringstream in(text);
        return parse_config(in, "test.conf");
    }

    std::string error_of(const std::string &text)
    {
        try
        {
            parse(text);
        }
        catch (const ConfigError &e)
        {
            return e.what();
        }
        return "";
    }
}

TEST_SUITE("config")
{
    TEST_CASE("the shipped default file describes the reference scene")
    {
        const RunConfig c = parse_config_file(kDefaultConf);
        const SceneConfig ref = reference_scene();
        CHECK(c.scene.geom.n_antennas == 100);
        CHECK(c.scene.geom.spacing == doctest::Approx(0.005));
        CHECK(c.scene.geom.spacing == doctest::Approx(c.scene.ofdm.wavelength() / 2.0));
        CHECK(c.scene.ofdm.subcarrier_spacing == doctest::Approx(720e3));
        REQUIRE(c.scene.paths.size() == 3);
        for (int l = 0; l < 3; ++l)
        {
            CHECK(c.scene.paths[l].distance == ref.paths[l].distance);
            CHECK(c.scene.paths[l].aoa == doctest::Approx(ref.paths[l].aoa).epsilon(1e-15));
            CHECK(c.scene.paths[l].d_ue == ref.paths[l].d_ue);
            CHECK(std::abs(c.scene.paths[l].gain - ref.paths[l].gain) < 1e-15);
        }
        CHECK(c.scene.noise_variance == doctest::Approx(ref.noise_variance).epsilon(1e-12));
        CHECK(c.campaign.snr_db.size() == 9);
        CHECK(c.campaign.methods.size() == 4);
        REQUIRE(c.log.size() == 4);
        CHECK(c.log[0] == "Fraunhofer distance 2D^2/lambda = 49.005 m (D = 0.495 m, lambda = 0.01 m)");
        CHECK(c.log[1] == "path 0 at 10.000 m: near field");
    }

    TEST_CASE("empty input gives the built-in defaults")
    {
        const RunConfig c = parse("");
        CHECK(c.scene.paths.size() == 3);
        CHECK(c.snr_db == 10.0);
        CHECK(c.ising.beta0 == 1.0);
        CHECK(c.ising.gamma0 == -0.2);
    }

    TEST_CASE("line-precise errors")
    {
        CHECK(error_of("[array]\nn_antennas = 100\nbogus = 3\n") == "test.conf:3: [array] bogus: unknown key");
        CHECK(error_of("[array]\nspacing = \"wide\"\n").rfind("test.conf:2:", 0) == 0);
        CHECK(error_of("[array\n").rfind("test.conf:1:", 0) == 0);
        CHECK(error_of("[nope]\n").rfind("test.conf:1:", 0) == 0);
        CHECK(error_of("[ao]\neta = 0.1\neta = 0.2\n").rfind("test.conf:3:", 0) == 0);
        CHECK(error_of("n_antennas = 3\n").rfind("test.conf:1:", 0) == 0);
        CHECK(error_of("[[path]]\ndistance = 5\naoa_deg = 10\nblocked = [[3]]\n").rfind("test.conf:4:", 0) == 0);
        CHECK(error_of("[array]\nn_antennas = 10 junk\n").rfind("test.conf:2:", 0) == 0);
        // Cross-field problems are reported without a line.
        CHECK(error_of("[[path]]\ndistance = 5\naoa_deg = 10\nd_ue = 3\n") ==
              "test.conf: SceneConfig: the LoS path (index 0) must have d_ue = 0");
    }

    TEST_CASE("paths replace the defaults")
    {
        const RunConfig c = parse("[[path]]\ndistance = 5\naoa_deg = 10\nblocked = [[3, 7], [20, 21]]\n");
        REQUIRE(c.scene.paths.size() == 1);
        CHECK(c.scene.paths[0].aoa == doctest::Approx(deg2rad(10.0)));
        REQUIRE(c.scene.blockage[0].size() == 2);
        CHECK(c.scene.blockage[0][1].first == 20);
        CHECK(c.scene.blockage[0][1].last == 21);
    }

    TEST_CASE("overrides")
    {
        RunConfig c = parse("");
        apply_overrides(c, {"noise.snr_db=20", "campaign.trials=7", "path.1.aoa_deg=40", "ao.b_evidence=\"alpha\""});
        CHECK(c.snr_db == 20.0);
        CHECK(c.scene.noise_variance == doctest::Approx(set_snr(c.scene, 20.0).noise_variance));
        CHECK(c.campaign.trials == 7);
        CHECK(c.scene.paths[1].aoa == doctest::Approx(deg2rad(40.0)));
        CHECK(c.ao.b_evidence == BEvidence::Alpha);
        CHECK_THROWS_AS(apply_overrides(c, {"noise.snr"}), ConfigError);
        CHECK_THROWS_AS(apply_overrides(c, {"noise.bogus=1"}), ConfigError);
        CHECK_THROWS_AS(apply_overrides(c, {"path.9.distance=1"}), ConfigError);
        CHECK_THROWS_AS(apply_overrides(c, {"ao.eta=0.5"}), ConfigError);
    }

    TEST_CASE("write_config round trip")
    {
        RunConfig c = parse_config_file(kDefaultConf);
        apply_overrides(c, {"noise.snr_db=17.5", "mle.d_points=77", "campaign.seed=123456789012",
                            "path.2.gain_phase=0.3"});
        std::stringstream out;
        write_config(out, c);
        const RunConfig back = parse_config(out, "round-trip");
        CHECK(back.snr_db == c.snr_db);
        CHECK(back.grid.d_points == 77);
        CHECK(back.campaign.seed == 123456789012ULL);
        CHECK(back.scene.noise_variance == c.scene.noise_variance);
        REQUIRE(back.scene.paths.size() == 3);
        for (int l = 0; l < 3; ++l)
        {
            CHECK(back.scene.paths[l].gain == c.scene.paths[l].gain);
            CHECK(back.scene.paths[l].aoa == doctest::Approx(c.scene.paths[l].aoa).epsilon(1e-15));
            CHECK(back.scene.paths[l].d_ue == c.scene.paths[l].d_ue);
        }
        CHECK(back.scene.blockage[2][0].first == 34);
        std::stringstream again;
        write_config(again, back);
        std::stringstream first;
        write_config(first, c);
        CHECK(again.str() == first.str());
    }
}
