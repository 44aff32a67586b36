// SPDX-License-Identifier: Apache-2.0

#include "elaa/app.hpp"

#include "elaa/selftest.hpp"
#include "elaa/svg.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace elaa
{
    namespace
    {
        namespace fs = std::filesystem;
        using nlohmann::json;

        class StageError : public std::runtime_error
        {
        public:
            StageError(int code, const std::string &message) : std::runtime_error(message), code(code) {}
            int code;
        };

        std::ofstream open_output(const fs::path &path)
        {
            std::ofstream out(path);
            if (!out)
                throw StageError(kExitConfig, "cannot write " + path.string());
            return out;
        }

        std::string g17(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

        json result_json(const RunConfig &config, const ObservationSet &obs, const EstimationResult &est,
                         const TrialRecord &score)
        {
            json paths = json::array();
            for (std::size_t l = 0; l < est.paths.size(); ++l)
            {
                const PathEstimate &p = est.paths[l];
                const PathParams &truth = obs.scene.paths[l];
                json blocked = json::array();
                for (Eigen::Index n = 0; n < p.b.size(); ++n)
                    if (p.b(n) < 0.5)
                        blocked.push_back(n + 1);
                paths.push_back({{"theta_deg", rad2deg(p.theta)},
                                 {"distance", p.distance},
                                 {"d_ue", p.d_ue},
                                 {"gain", complex_json(p.gain)},
                                 {"x", p.x},
                                 {"y", p.y},
                                 {"residual", p.residual},
                                 {"blocked_antennas", blocked},
                                 {"truth",
                                  {{"theta_deg", rad2deg(truth.aoa)},
                                   {"distance", truth.distance},
                                   {"d_ue", truth.d_ue},
                                   {"gain", complex_json(truth.gain)},
                                   {"x", truth.distance * std::cos(truth.aoa)},
                                   {"y", truth.distance * std::sin(truth.aoa)}}},
                                 {"position_error", score.position_error[l]},
                                 {"gain_error", score.gain_error[l]},
                                 {"detection_rate", score.vr[l].detection},
                                 {"false_alarm_rate", score.vr[l].false_alarm}});
            }
            return {{"snr_db", config.snr_db},
                    {"noiseless", config.noiseless},
                    {"seed", config.campaign.seed},
                    {"noise_variance", obs.scene.noise_variance},
                    {"iterations", est.iterations},
                    {"converged", est.converged},
                    {"all_blocked_detected", score.all_blocked_detected},
                    {"paths", paths}};
        }

        void run_single(const RunConfig &config, const fs::path &out, std::ostream &log)
        {
            const EstimatorSetup setup = make_setup(config);
            std::seed_seq seq{static_cast<std::uint32_t>(config.campaign.seed),
                              static_cast<std::uint32_t>(config.campaign.seed >> 32), 0u};
            Rng rng(seq);
            ObservationSet obs = synthesize(config.scene, rng);
            if (config.noiseless)
            {
                obs.y.data -= obs.noise.data;
                obs.noise.data.setZero();
            }

            const KnownConstants known = KnownConstants::from_scene(config.scene);
            const AOState init = default_init(obs.y, known, *setup.dict, setup.ao.ridge);
            AOState state;
            const EstimationResult est = run_proposed(obs, setup, init, &state);
            for (const PathEstimate &p : est.paths)
                if (!std::isfinite(p.distance) || !std::isfinite(p.theta) || !std::isfinite(std::abs(p.gain)))
                    throw StageError(kExitNumerical, "estimate is not finite");
            const TrialRecord score = score_trial(est, obs, Method::Proposed);

            {
                std::ofstream f = open_output(out / "trace_proposed.csv");
                write_trace_csv(f, state);
            }
            {
                std::ofstream f = open_output(out / "result.json");
                f << result_json(config, obs, est, score).dump(2) << '\n';
            }
            {
                std::ofstream f = open_output(out / "vr_detection.svg");
                write_vr_svg(f, est, obs.vr);
            }
            {
                std::ofstream f = open_output(out / "scatterers.svg");
                write_scatter_svg(f, obs.scene, est);
            }

            log << "AO: " << est.iterations << " iterations, " << (est.converged ? "converged" : "not converged")
                << '\n';
            for (std::size_t l = 0; l < est.paths.size(); ++l)
            {
                const PathEstimate &p = est.paths[l];
                char buf[200];
                std::snprintf(buf, sizeof buf,
                              "path %zu: d = %.4f m, theta = %.3f deg, d_ue = %.3f m, position (%.4f, %.4f) m, "
                              "error %.4f m, detection %.2f, false alarm %.3f",
                              l, p.distance, rad2deg(p.theta), p.d_ue, p.x, p.y, score.position_error[l],
                              score.vr[l].detection, score.vr[l].false_alarm);
                log << buf << '\n';
            }
        }

        void run_campaign_mode(const RunConfig &config, const fs::path &out, std::ostream &log)
        {
            const EstimatorSetup setup = make_setup(config);
            log << "campaign: " << config.campaign.trials << " trials x " << config.campaign.snr_db.size()
                << " SNR points x " << config.campaign.methods.size() << " methods\n";
            const CampaignResult result = run_campaign(config.scene, config.campaign, setup);
            for (const auto &row : result.report.rows)
                if (!std::isfinite(row.value))
                    throw StageError(kExitNumerical, "non-finite metric " + row.method + "/" + row.metric);
            {
                std::ofstream f = open_output(out / "report.csv");
                write_report_csv(f, result.report);
            }
            {
                std::ofstream f = open_output(out / "summary.txt");
                write_summary(f, result.report, config.campaign);
            }
            {
                std::ofstream f = open_output(out / "rmse_vs_snr.svg");
                write_rmse_svg(f, result.report, config.campaign);
            }
            for (double snr : config.campaign.snr_db)
                for (Method m : config.campaign.methods)
                {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "%6.1f dB %-10s location RMSE %.4g m, gain RMSE %.4g", snr,
                                  to_string(m), result.report.value(snr, m, "location_rmse"),
                                  result.report.value(snr, m, "gain_rmse"));
                    log << buf << '\n';
                }
        }

        bool run_selftest_mode(const RunConfig &config, const fs::path &out, std::ostream &log)
        {
            bool ok = true;
            std::ofstream f = open_output(out / "selftest.txt");
            for (const CheckResult &r : run_selftest(config.scene))
            {
                const std::string line = std::string(r.passed ? "PASS " : "FAIL ") + r.name + ": " + r.detail;
                log << line << '\n';
                f << line << '\n';
                ok = ok && r.passed;
            }
            return ok;
        }
    }

    RunConfig load_run_config(const RunSpec &spec)
    {
        RunConfig config;
        if (spec.config_path.empty())
        {
            std::istringstream empty;
            config = parse_config(empty, "<defaults>");
        }
        else
            config = parse_config_file(spec.config_path);

        std::vector<std::string> overrides;
        if (spec.seed)
            overrides.push_back("campaign.seed=" + std::to_string(*spec.seed));
        if (spec.snr_db)
        {
            overrides.push_back("noise.snr_db=" + g17(*spec.snr_db));
            overrides.push_back("campaign.snr_db=[" + g17(*spec.snr_db) + "]");
        }
        if (spec.trials)
            overrides.push_back("campaign.trials=" + std::to_string(*spec.trials));
        overrides.insert(overrides.end(), spec.overrides.begin(), spec.overrides.end());
        if (!overrides.empty())
            apply_overrides(config, overrides);
        return config;
    }

    EstimatorSetup make_setup(const RunConfig &config)
    {
        EstimatorSetup setup;
        const Dims d = config.scene.dims();
        setup.ising = config.ising.build(d.N(), d.L(), d.T());
        setup.ao = config.ao;
        setup.dict = std::make_shared<const SteeringDictionary>(config.scene.geom, config.scene.ofdm, config.grid);
        setup.baseline_rounds = config.baseline_rounds;
        return setup;
    }

    int run(const RunSpec &spec, std::ostream &log, std::ostream &err)
    {
        if (spec.mode != "single" && spec.mode != "campaign" && spec.mode != "selftest")
        {
            err << "error: unknown mode '" << spec.mode << "'\n";
            return kExitConfig;
        }

        RunConfig config;
        try
        {
            config = load_run_config(spec);
        }
        catch (const ConfigError &e)
        {
            err << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        for (const std::string &line : config.log)
            log << line << '\n';

        const fs::path out(spec.out_dir);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec)
        {
            err << "error: cannot create " << out.string() << ": " << ec.message() << '\n';
            return kExitConfig;
        }

        int code = kExitOk;
        std::string failure;
        try
        {
            {
                std::ofstream f = open_output(out / "config_used.conf");
                write_config(f, config);
            }
            if (spec.mode == "single")
                run_single(config, out, log);
            else if (spec.mode == "campaign")
                run_campaign_mode(config, out, log);
            else if (!run_selftest_mode(config, out, log))
            {
                code = kExitSelftest;
                failure = "selftest: at least one check failed";
            }
        }
        catch (const StageError &e)
        {
            code = e.code;
            failure = e.what();
        }
        catch (const SingularSystem &e)
        {
            code = kExitNumerical;
            failure = std::string("numerical failure: ") + e.what();
        }
        catch (const InvalidParameter &e)
        {
            code = kExitNumerical;
            failure = std::string("invalid intermediate value: ") + e.what();
        }

        std::ofstream status(out / "status.txt");
        if (code == kExitOk)
            status << "ok\n";
        else
        {
            // Files already written in this directory are incomplete.
            status << "failed (exit " << code << "): " << failure << '\n';
            err << "error: " << failure << '\n';
        }
        return code;
    }
}
