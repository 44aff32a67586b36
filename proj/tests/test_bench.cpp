// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "elaa/app.hpp"
#include "elaa/bench.hpp"
#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace elaa;

namespace
{
    EstimatorSetup small_setup()
    {
        std::istringstream empty;
        return make_setup(parse_config(empty));
    }

    const EstimatorSetup &setup()
    {
        static const EstimatorSetup s = small_setup();
        return s;
    }

    CampaignSpec small_campaign()
    {
        CampaignSpec spec;
        spec.snr_db = {10.0, 20.0};
        spec.trials = 2;
        spec.seed = 77;
        spec.threads = 1;
        return spec;
    }

    double total_residual(const EstimationResult &est)
    {
        double s = 0.0;
        for (const auto &p : est.paths)
            s += p.residual;
        return s;
    }
}

TEST_SUITE("bench")
{
    TEST_CASE("visibility metrics")
    {
        const RMatrix truth = (RMatrix(4, 1) << 1, 0, 0, 1).finished();
        VrRates r = vr_metrics(truth, truth);
        CHECK(r.detection == 1.0);
        CHECK(r.false_alarm == 0.0);
        CHECK(r.blocked == 2);
        CHECK(r.visible == 2);

        r = vr_metrics(RMatrix::Ones(4, 1), truth);
        CHECK(r.detection == 0.0);
        CHECK(r.false_alarm == 0.0);

        r = vr_metrics(RMatrix::Zero(4, 1), truth);
        CHECK(r.detection == 1.0);
        CHECK(r.false_alarm == 1.0);

        // No blocked entries: detection is vacuously complete.
        r = vr_metrics(RMatrix::Ones(3, 2), RMatrix::Ones(3, 2));
        CHECK(r.detection == 1.0);
        CHECK_THROWS_AS(vr_metrics(RMatrix::Ones(3, 1), RMatrix::Ones(4, 1)), InvalidParameter);
    }

    TEST_CASE("RMSE and its standard error")
    {
        CHECK(rmse({0.0, 1.0}) == doctest::Approx(std::sqrt(0.5)));
        CHECK(rmse({1.0, 1.0}) == 1.0);
        const RmseStat constant = rmse_with_se({4.0, 4.0, 4.0});
        CHECK(constant.rmse == 2.0);
        CHECK(constant.se == 0.0);
        // e2 = {1, 3}: rmse 2^0.5, std sqrt(2), se = sqrt(2) / sqrt(2) / (2 sqrt(2)).
        const RmseStat two = rmse_with_se({1.0, 3.0});
        CHECK(two.se == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))));
    }

    TEST_CASE("aggregation of hand-made records")
    {
        CampaignSpec spec;
        spec.snr_db = {5.0};
        spec.methods = {Method::NoSns};
        std::vector<TrialRecord> recs(2);
        for (int i = 0; i < 2; ++i)
        {
            recs[i].snr_db = 5.0;
            recs[i].method = Method::NoSns;
            recs[i].vr = {VrRates{1.0, 0.0, 6, 94}, VrRates{0.5, 0.1, 4, 96}};
        }
        recs[0].position_error = {0.0, 0.0};
        recs[1].position_error = {1.0, 1.0};
        recs[0].gain_error = recs[1].gain_error = {0.1, 0.1};
        recs[0].gain_raw_error = recs[1].gain_raw_error = {0.2, 0.2};
        const MCReport rep = aggregate(recs, spec);
        CHECK(rep.value(5.0, Method::NoSns, "location_rmse") == doctest::Approx(std::sqrt(0.5)));
        CHECK(rep.value(5.0, Method::NoSns, "location_median_error") == doctest::Approx(0.5));
        CHECK(rep.value(5.0, Method::NoSns, "gain_rmse") == doctest::Approx(0.1));
        CHECK(rep.value(5.0, Method::NoSns, "gain_raw_rmse") == doctest::Approx(0.2));
        CHECK(rep.value(5.0, Method::NoSns, "detection_rate") == doctest::Approx(0.8));
        CHECK(rep.value(5.0, Method::NoSns, "false_alarm_rate") == doctest::Approx(9.6 / 190.0));
        CHECK(rep.value(5.0, Method::NoSns, "max_path_false_alarm") == doctest::Approx(0.1));
        CHECK_THROWS_AS(rep.value(5.0, Method::NoSns, "mean_iterations"), std::out_of_range);
        CHECK_THROWS_AS(rep.value(10.0, Method::NoSns, "location_rmse"), std::out_of_range);
    }

    TEST_CASE("method names")
    {
        for (Method m : {Method::Proposed, Method::NoSns, Method::RandomSns, Method::KnownSns})
            CHECK(method_from_string(to_string(m)) == m);
        CHECK(baseline_of(Method::Proposed) == std::nullopt);
        CHECK(baseline_of(Method::KnownSns) == BaselineKind::KnownSns);
        CHECK_THROWS(method_from_string("oracle"));
    }

    TEST_CASE("baselines on one observation")
    {
        const SceneConfig scene = set_snr(reference_scene(), 30.0);
        const ObservationSet obs = test::noiseless_observation(scene, 6);
        const KnownConstants known = KnownConstants::from_scene(scene);
        const AOState init = default_init(obs.y, known, *setup().dict);

        Rng r1(5), r2(5);
        const EstimationResult known_sns = run_baseline(BaselineKind::KnownSns, obs, setup(), init, r1);
        const EstimationResult no_sns = run_baseline(BaselineKind::NoSns, obs, setup(), init, r1);
        const EstimationResult rand_a = run_baseline(BaselineKind::RandomSns, obs, setup(), init, r1);
        const EstimationResult rand_b = run_baseline(BaselineKind::RandomSns, obs, setup(), init, r2);

        // Known amplitudes on noiseless data: the scatterers are recovered.
        const TrialRecord score = score_trial(known_sns, obs, Method::KnownSns);
        for (double e : score.position_error)
            CHECK(e < 0.01);
        CHECK(total_residual(no_sns) > total_residual(known_sns));
        CHECK(rand_a.paths.size() == 3);
        // Same generator state, same random amplitudes, same estimate.
        const TrialRecord sb = score_trial(rand_b, obs, Method::RandomSns);
        Rng r3(5);
        const EstimationResult rand_c = run_baseline(BaselineKind::RandomSns, obs, setup(), init, r3);
        CHECK(score_trial(rand_c, obs, Method::RandomSns).position_error == sb.position_error);
    }

    TEST_CASE("one-cell campaign")
    {
        CampaignSpec spec = small_campaign();
        spec.snr_db = {20.0};
        spec.trials = 1;
        spec.methods = {Method::Proposed};
        const CampaignResult res = run_campaign(reference_scene(), spec, setup());
        REQUIRE(res.trials.size() == 1);
        CHECK(res.report.rows.size() == 15);
        CHECK(res.report.value(20.0, Method::Proposed, "location_rmse") ==
              doctest::Approx(std::sqrt((res.trials[0].position_error[0] * res.trials[0].position_error[0] +
                                         res.trials[0].position_error[1] * res.trials[0].position_error[1] +
                                         res.trials[0].position_error[2] * res.trials[0].position_error[2]) /
                                        3.0)));
        CHECK(res.report.value(20.0, Method::Proposed, "monotonicity_violations") == 0.0);
    }

    TEST_CASE("campaigns are deterministic and thread-count independent; CSV round trip")
    {
        CampaignSpec spec = small_campaign();
        const CampaignResult a = run_campaign(reference_scene(), spec, setup());
        spec.threads = 2;
        const CampaignResult b = run_campaign(reference_scene(), spec, setup());
        CHECK(a.report == b.report);
        CHECK(a.trials.size() == 2 * 2 * 4);

        std::stringstream csv;
        write_report_csv(csv, a.report);
        CHECK(read_report_csv(csv) == a.report);

        std::ostringstream summary;
        write_summary(summary, a.report, spec);
        CHECK(summary.str().find("proposed.10dB.location_rmse=") != std::string::npos);

        spec.seed = 78;
        CHECK_FALSE(run_campaign(reference_scene(), spec, setup()).report == a.report);
    }

    TEST_CASE("campaign validation")
    {
        CampaignSpec spec = small_campaign();
        spec.trials = 0;
        CHECK_THROWS_AS(run_campaign(reference_scene(), spec, setup()), InvalidParameter);
    }
}
