// SPDX-License-Identifier: Apache-2.0

#include "elaa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace elaa
{
    namespace
    {
        std::string format_double(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string format_short(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%g", v);
            return buf;
        }

        double mean(const std::vector<double> &v)
        {
            return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        }

        double median(std::vector<double> v)
        {
            if (v.empty())
                return 0.0;
            std::sort(v.begin(), v.end());
            const std::size_t m = v.size() / 2;
            return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
        }

        double sq_mean(const std::vector<double> &v)
        {
            double s = 0.0;
            for (double x : v)
                s += x * x;
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        }

        // Alternates step_g and single-path refinement with alpha held fixed.
        void fit_with_fixed_alpha(const ObservationTensor &y, const KnownConstants &known, const AOConfig &config,
                                  int rounds, AOState &s)
        {
            const Dims d = known.dims();
            const CVector y_bar = stack_observations(StackTag::GForm, y);
            double previous = (y.data - model_tensor(d, s.g, s.h, s.alpha).data).squaredNorm();
            for (int round = 0; round < rounds; ++round)
            {
                s.g = step_g(y_bar, regressor_g_form(d, s.h, s.alpha), config.ridge).x;
                for (int l = 0; l < d.L(); ++l)
                    s.paths[static_cast<std::size_t>(l)].gain = s.g(l);
                for (int l = 0; l < d.L(); ++l)
                    refine_path(y, known, l, s.alpha, config.refine, s.g, s.h, s.paths);
                const double misfit = (y.data - model_tensor(d, s.g, s.h, s.alpha).data).squaredNorm();
                const bool settled = std::abs(previous - misfit) <= config.tolerance * std::abs(previous);
                previous = misfit;
                if (settled)
                    break;
            }
        }
    }

    const char *to_string(Method method)
    {
        switch (method)
        {
        case Method::Proposed:
            return "proposed";
        case Method::NoSns:
            return "no-sns";
        case Method::RandomSns:
            return "random-sns";
        case Method::KnownSns:
            return "known-sns";
        }
        return "?";
    }

    Method method_from_string(const std::string &name)
    {
        for (Method m : {Method::Proposed, Method::NoSns, Method::RandomSns, Method::KnownSns})
            if (name == to_string(m))
                return m;
        throw InvalidParameter("unknown method '" + name + "'");
    }

    std::optional<BaselineKind> baseline_of(Method method)
    {
        switch (method)
        {
        case Method::NoSns:
            return BaselineKind::NoSns;
        case Method::RandomSns:
            return BaselineKind::RandomSns;
        case Method::KnownSns:
            return BaselineKind::KnownSns;
        default:
            return std::nullopt;
        }
    }

    EstimationResult run_proposed(const ObservationSet &obs, const EstimatorSetup &setup, const AOState &init,
                                  AOState *final_state)
    {
        if (!setup.dict)
            throw InvalidParameter("run_proposed: no steering dictionary");
        const KnownConstants known = KnownConstants::from_scene(obs.scene);
        AOState state = run_ao(obs.y, known, setup.ising, setup.ao, init);
        EstimationResult result = extract(state, known.dims(), *setup.dict);
        if (final_state)
            *final_state = std::move(state);
        return result;
    }

    EstimationResult run_baseline(BaselineKind kind, const ObservationSet &obs, const EstimatorSetup &setup,
                                  const AOState &init, Rng &rng)
    {
        if (!setup.dict)
            throw InvalidParameter("run_baseline: no steering dictionary");
        const KnownConstants known = KnownConstants::from_scene(obs.scene);
        const Dims d = known.dims();

        AOState s = init;
        switch (kind)
        {
        case BaselineKind::NoSns:
            s.b = RVector::Ones(d.nlt());
            break;
        case BaselineKind::RandomSns:
        {
            std::bernoulli_distribution coin(0.5);
            VRIndicator guess;
            guess.b.resize(d.N(), d.L());
            for (int l = 0; l < d.L(); ++l)
                for (int n = 0; n < d.N(); ++n)
                    guess.b(n, l) = coin(rng) ? 1.0 : 0.0;
            s.b = guess.expanded(d.T());
            break;
        }
        case BaselineKind::KnownSns:
            s.b = obs.vr.expanded(d.T());
            break;
        }
        s.alpha = kind == BaselineKind::KnownSns ? obs.sns.alpha : CVector(s.b.cast<Complex>());
        s.b_relaxed = s.b;
        fit_with_fixed_alpha(obs.y, known, setup.ao, setup.baseline_rounds, s);
        return extract(s, d, *setup.dict);
    }

    VrRates vr_metrics(const RMatrix &b_hat, const RMatrix &b_true)
    {
        if (b_hat.rows() != b_true.rows() || b_hat.cols() != b_true.cols())
            throw InvalidParameter("vr_metrics: indicator shapes differ");
        VrRates r;
        int detected = 0;
        int alarms = 0;
        for (Eigen::Index j = 0; j < b_true.cols(); ++j)
            for (Eigen::Index i = 0; i < b_true.rows(); ++i)
            {
                const bool blocked = b_true(i, j) < 0.5;
                const bool declared = b_hat(i, j) < 0.5;
                if (blocked)
                {
                    ++r.blocked;
                    detected += declared ? 1 : 0;
                }
                else
                {
                    ++r.visible;
                    alarms += declared ? 1 : 0;
                }
            }
        r.detection = r.blocked ? static_cast<double>(detected) / r.blocked : 1.0;
        r.false_alarm = r.visible ? static_cast<double>(alarms) / r.visible : 0.0;
        return r;
    }

    double rmse(const std::vector<double> &squared_errors)
    {
        if (squared_errors.empty())
            throw InvalidParameter("rmse: need at least one error");
        return std::sqrt(mean(squared_errors));
    }

    RmseStat rmse_with_se(const std::vector<double> &per_trial_mse)
    {
        RmseStat out;
        out.rmse = rmse(per_trial_mse);
        const auto M = static_cast<double>(per_trial_mse.size());
        if (per_trial_mse.size() > 1 && out.rmse > 0.0)
        {
            const double m = mean(per_trial_mse);
            double var = 0.0;
            for (double e : per_trial_mse)
                var += (e - m) * (e - m);
            var /= M - 1.0;
            out.se = std::sqrt(var) / std::sqrt(M) / (2.0 * out.rmse);
        }
        return out;
    }

    void CampaignSpec::validate() const
    {
        if (trials < 1)
            throw InvalidParameter("campaign: trials must be at least 1");
        if (snr_db.empty())
            throw InvalidParameter("campaign: need at least one SNR point");
        for (double s : snr_db)
            if (!std::isfinite(s))
                throw InvalidParameter("campaign: SNR points must be finite");
        if (methods.empty())
            throw InvalidParameter("campaign: need at least one method");
        if (threads < 0)
            throw InvalidParameter("campaign: threads must be non-negative");
    }

    double MCReport::value(double snr_db, Method method, const std::string &metric) const
    {
        const std::string name = to_string(method);
        for (const Row &r : rows)
            if (r.snr_db == snr_db && r.method == name && r.metric == metric)
                return r.value;
        throw std::out_of_range("MCReport: no cell " + name + "/" + metric + " at " + format_short(snr_db) + " dB");
    }

    TrialRecord score_trial(const EstimationResult &est, const ObservationSet &obs, Method method)
    {
        const SceneConfig &scene = obs.scene;
        const auto L = scene.paths.size();
        if (est.paths.size() != L)
            throw InvalidParameter("score_trial: path count differs from the ground truth");

        TrialRecord rec;
        rec.method = method;
        rec.iterations = est.iterations;
        rec.converged = est.converged;
        rec.all_blocked_detected = true;
        for (std::size_t l = 0; l < L; ++l)
        {
            const PathParams &truth = scene.paths[l];
            const PathEstimate &p = est.paths[l];
            const auto [x, y] = scatterer_position(truth.distance, truth.aoa);
            rec.position_error.push_back(std::hypot(p.x - x, p.y - y));
            const Complex ref_hat = reference_response(p.gain, p.distance, p.d_ue, scene.ofdm);
            const Complex ref_true = reference_response(truth.gain, truth.distance, truth.d_ue, scene.ofdm);
            rec.gain_error.push_back(std::abs(ref_hat - ref_true));
            rec.gain_raw_error.push_back(std::abs(p.gain - truth.gain));
            const VrRates vr = vr_metrics(p.b, obs.vr.b.col(static_cast<Eigen::Index>(l)));
            rec.vr.push_back(vr);
            if (vr.detection < 1.0)
                rec.all_blocked_detected = false;
        }
        return rec;
    }

    CampaignResult run_campaign(const SceneConfig &scene, const CampaignSpec &spec, const EstimatorSetup &setup)
    {
        spec.validate();
        scene.validate();
        if (!setup.dict)
            throw InvalidParameter("run_campaign: no steering dictionary");

        const std::size_t n_snr = spec.snr_db.size();
        const auto n_trials = static_cast<std::size_t>(spec.trials);
        const std::size_t n_items = n_snr * n_trials;
        std::vector<std::vector<TrialRecord>> slots(n_items);

        auto work = [&](std::size_t item)
        {
            const std::size_t si = item / n_trials;
            const auto trial = static_cast<int>(item % n_trials);
            const double snr = spec.snr_db[si];
            const SceneConfig sc = set_snr(scene, snr);

            std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                              static_cast<std::uint32_t>(trial)};
            Rng rng(seq);
            const ObservationSet obs = synthesize(sc, rng);
            std::seed_seq guess_seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                                    static_cast<std::uint32_t>(trial), 1u};
            Rng guess_rng(guess_seq);

            const KnownConstants known = KnownConstants::from_scene(sc);
            const AOState init = default_init(obs.y, known, *setup.dict, setup.ao.ridge);

            std::vector<TrialRecord> out;
            for (Method m : spec.methods)
            {
                TrialRecord rec;
                if (m == Method::Proposed)
                {
                    AOState state;
                    const EstimationResult est = run_proposed(obs, setup, init, &state);
                    rec = score_trial(est, obs, m);
                    rec.b_rejections = state.b_rejections;
                    for (const SubstepRecord &ss : state.substeps)
                    {
                        const bool rose = ss.after > ss.before + 1e-9 * std::abs(ss.before);
                        if (ss.step == "b")
                        {
                            rec.rounding_iterations += rose ? 1 : 0;
                            rec.guard_iterations += ss.rounding_raised ? 1 : 0;
                        }
                        else if (rose)
                            ++rec.monotonicity_violations;
                    }
                }
                else
                {
                    const EstimationResult est = run_baseline(*baseline_of(m), obs, setup, init, guess_rng);
                    rec = score_trial(est, obs, m);
                }
                rec.snr_db = snr;
                rec.trial = trial;
                out.push_back(std::move(rec));
            }
            slots[item] = std::move(out);
        };

        unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
        workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_items)));

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto loop = [&]
        {
            for (std::size_t item = next++; item < n_items; item = next++)
            {
                try
                {
                    work(item);
                }
                catch (...)
                {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = n_items;
                }
            }
        };
        if (workers == 1)
            loop();
        else
        {
            std::vector<std::thread> pool;
            for (unsigned i = 0; i < workers; ++i)
                pool.emplace_back(loop);
            for (auto &t : pool)
                t.join();
        }
        if (failure)
            std::rethrow_exception(failure);

        CampaignResult result;
        for (auto &slot : slots)
            for (auto &rec : slot)
                result.trials.push_back(std::move(rec));
        result.report = aggregate(result.trials, spec);
        return result;
    }

    MCReport aggregate(const std::vector<TrialRecord> &trials, const CampaignSpec &spec)
    {
        MCReport report;
        for (double snr : spec.snr_db)
            for (Method m : spec.methods)
            {
                std::vector<const TrialRecord *> group;
                for (const TrialRecord &r : trials)
                    if (r.snr_db == snr && r.method == m)
                        group.push_back(&r);
                if (group.empty())
                    continue;

                std::vector<double> loc_mse, gain_mse, gain_raw_mse, loc_err;
                double detected = 0.0, blocked = 0.0, alarms = 0.0, visible = 0.0;
                double all_detected = 0.0, converged = 0.0, iterations = 0.0;
                double rounding = 0.0, guarded = 0.0, violations = 0.0;
                std::vector<double> path_fa;
                for (const TrialRecord *r : group)
                {
                    loc_mse.push_back(sq_mean(r->position_error));
                    gain_mse.push_back(sq_mean(r->gain_error));
                    gain_raw_mse.push_back(sq_mean(r->gain_raw_error));
                    loc_err.insert(loc_err.end(), r->position_error.begin(), r->position_error.end());
                    path_fa.resize(std::max(path_fa.size(), r->vr.size()), 0.0);
                    for (std::size_t l = 0; l < r->vr.size(); ++l)
                    {
                        const VrRates &v = r->vr[l];
                        detected += v.detection * v.blocked;
                        blocked += v.blocked;
                        alarms += v.false_alarm * v.visible;
                        visible += v.visible;
                        path_fa[l] += v.false_alarm;
                    }
                    all_detected += r->all_blocked_detected ? 1.0 : 0.0;
                    converged += r->converged ? 1.0 : 0.0;
                    iterations += r->iterations;
                    rounding += r->rounding_iterations;
                    guarded += r->guard_iterations;
                    violations += r->monotonicity_violations;
                }
                const auto M = static_cast<double>(group.size());
                const RmseStat loc = rmse_with_se(loc_mse);
                const RmseStat gain = rmse_with_se(gain_mse);
                double max_fa = 0.0;
                for (double fa : path_fa)
                    max_fa = std::max(max_fa, fa / M);

                auto add = [&](const char *metric, double value)
                { report.rows.push_back({snr, to_string(m), metric, value, static_cast<int>(group.size())}); };
                add("location_rmse", loc.rmse);
                add("location_rmse_se", loc.se);
                add("location_median_error", median(loc_err));
                add("gain_rmse", gain.rmse);
                add("gain_rmse_se", gain.se);
                add("gain_raw_rmse", rmse(gain_raw_mse));
                add("detection_rate", blocked > 0 ? detected / blocked : 1.0);
                add("false_alarm_rate", visible > 0 ? alarms / visible : 0.0);
                add("max_path_false_alarm", max_fa);
                add("all_detected_fraction", all_detected / M);
                if (m == Method::Proposed)
                {
                    add("converged_fraction", converged / M);
                    add("mean_iterations", iterations / M);
                    add("b_step_increases_per_iteration", iterations > 0 ? rounding / iterations : 0.0);
                    add("guard_rejections_per_iteration", iterations > 0 ? guarded / iterations : 0.0);
                    add("monotonicity_violations", violations);
                }
            }
        return report;
    }

    void write_report_csv(std::ostream &out, const MCReport &report)
    {
        out << "snr_db,method,metric,value,trials\n";
        for (const auto &r : report.rows)
            out << format_double(r.snr_db) << ',' << r.method << ',' << r.metric << ',' << format_double(r.value)
                << ',' << r.trials << '\n';
    }

    MCReport read_report_csv(std::istream &in)
    {
        MCReport report;
        std::string line;
        if (!std::getline(in, line) || line != "snr_db,method,metric,value,trials")
            throw InvalidParameter("report CSV: unexpected header");
        int line_no = 1;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ','))
                fields.push_back(field);
            if (fields.size() != 5)
                throw InvalidParameter("report CSV: line " + std::to_string(line_no) + " must have 5 fields");
            try
            {
                report.rows.push_back({std::stod(fields[0]), fields[1], fields[2], std::stod(fields[3]),
                                       std::stoi(fields[4])});
            }
            catch (const std::logic_error &)
            {
                throw InvalidParameter("report CSV: line " + std::to_string(line_no) + " has a malformed number");
            }
        }
        return report;
    }

    void write_summary(std::ostream &out, const MCReport &report, const CampaignSpec &spec)
    {
        out << "trials=" << spec.trials << '\n';
        out << "seed=" << spec.seed << '\n';
        out << "snr_db=";
        for (std::size_t i = 0; i < spec.snr_db.size(); ++i)
            out << (i ? "," : "") << format_short(spec.snr_db[i]);
        out << "\nmethods=";
        for (std::size_t i = 0; i < spec.methods.size(); ++i)
            out << (i ? "," : "") << to_string(spec.methods[i]);
        out << '\n';
        for (const auto &r : report.rows)
            out << r.method << '.' << format_short(r.snr_db) << "dB." << r.metric << '=' << format_double(r.value)
                << '\n';
    }
}
