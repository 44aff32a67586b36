// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo comparison of the proposed estimator with three least-squares
// baselines that fix the amplitudes instead of estimating them.

#pragma once

#include "elaa/ao.hpp"
#include "elaa/extract.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace elaa
{
    enum class BaselineKind
    {
        NoSns,     // alpha = 1
        RandomSns, // alpha = b_rand, b_rand ~ Bernoulli(0.5) per antenna and path
        KnownSns   // alpha = ground truth
    };

    enum class Method
    {
        Proposed,
        NoSns,
        RandomSns,
        KnownSns
    };

    const char *to_string(Method method);
    Method method_from_string(const std::string &name);
    std::optional<BaselineKind> baseline_of(Method method);

    struct EstimatorSetup
    {
        IsingParams ising;
        AOConfig ao;
        DictionaryPtr dict; // built from the scene geometry and the MLE grid
        int baseline_rounds = 10;
    };

    /// Shared initial point, then the AO loop and the MLE stage.
    EstimationResult run_proposed(const ObservationSet &obs, const EstimatorSetup &setup, const AOState &init,
                                  AOState *final_state = nullptr);

    /// Alternates step_g and single-path refinement with alpha fixed by `kind`,
    /// then fits every path by MLE. No amplitude or indicator estimation.
    EstimationResult run_baseline(BaselineKind kind, const ObservationSet &obs, const EstimatorSetup &setup,
                                  const AOState &init, Rng &rng);

    struct VrRates
    {
        double detection = 0.0;   // blocked antennas declared blocked
        double false_alarm = 0.0; // visible antennas declared blocked
        int blocked = 0;
        int visible = 0;
    };

    /// Rates over all entries of two N x L (or N) indicator arrays. With no
    /// blocked entries the detection rate is 1; with no visible entries the
    /// false-alarm rate is 0.
    VrRates vr_metrics(const RMatrix &b_hat, const RMatrix &b_true);

    /// sqrt(mean(squared_errors)).
    double rmse(const std::vector<double> &squared_errors);

    struct RmseStat
    {
        double rmse = 0.0;
        double se = 0.0; // delta-method standard error
    };

    /// RMSE over trials from per-trial mean squared errors, with standard error
    /// std(e2) / sqrt(M) / (2 rmse).
    RmseStat rmse_with_se(const std::vector<double> &per_trial_mse);

    struct TrialRecord
    {
        double snr_db = 0.0;
        int trial = 0;
        Method method = Method::Proposed;
        std::vector<double> position_error;   // per path [m]
        std::vector<double> gain_error;       // per path, reference-point response
        std::vector<double> gain_raw_error;   // per path, |g_hat - g|
        std::vector<VrRates> vr;              // per path
        bool all_blocked_detected = false;
        int iterations = 0;
        bool converged = false;
        int b_rejections = 0;
        int monotonicity_violations = 0; // g/h/alpha sub-steps that raised the objective
        int rounding_iterations = 0;     // iterations whose b-step raised the objective
        int guard_iterations = 0;        // iterations whose unguarded rounded proposal would have raised it
    };

    struct CampaignSpec
    {
        std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20, 25, 30};
        int trials = 100;
        std::uint64_t seed = 1;
        std::vector<Method> methods{Method::Proposed, Method::NoSns, Method::RandomSns, Method::KnownSns};
        int threads = 0; // 0: hardware concurrency

        void validate() const;
    };

    struct MCReport
    {
        struct Row
        {
            double snr_db = 0.0;
            std::string method;
            std::string metric;
            double value = 0.0;
            int trials = 0;

            bool operator==(const Row &) const = default;
        };
        std::vector<Row> rows;

        /// Value of one cell; throws std::out_of_range when absent.
        double value(double snr_db, Method method, const std::string &metric) const;
        bool operator==(const MCReport &) const = default;
    };

    struct CampaignResult
    {
        MCReport report;
        std::vector<TrialRecord> trials; // ordered by (snr, trial, method)
    };

    /// Scores one estimate against the ground truth of `obs`.
    TrialRecord score_trial(const EstimationResult &est, const ObservationSet &obs, Method method);

    /// Runs every (snr, trial) work item, each on its own observation shared by
    /// all methods. Trial t uses the seed sequence {seed, t} at every SNR.
    CampaignResult run_campaign(const SceneConfig &scene, const CampaignSpec &spec, const EstimatorSetup &setup);

    /// Aggregates trial records into report rows.
    MCReport aggregate(const std::vector<TrialRecord> &trials, const CampaignSpec &spec);

    void write_report_csv(std::ostream &out, const MCReport &report);
    MCReport read_report_csv(std::istream &in);
    void write_summary(std::ostream &out, const MCReport &report, const CampaignSpec &spec);
}
