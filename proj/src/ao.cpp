// SPDX-License-Identifier: Apache-2.0

#include "elaa/ao.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace elaa
{
    namespace
    {
        constexpr double kSingularRatio = 1e-13;
        constexpr double kIllConditionedRatio = 1e-10;

        CVector gains_of(const std::vector<PathParams> &paths)
        {
            CVector g(static_cast<Eigen::Index>(paths.size()));
            for (std::size_t l = 0; l < paths.size(); ++l)
                g(static_cast<Eigen::Index>(l)) = paths[l].gain;
            return g;
        }

        void check_state(const Dims &d, const CVector &g, const CVector &h, const CVector &alpha, const RVector &b)
        {
            if (g.size() != d.L() || h.size() != d.nlk() || alpha.size() != d.nlt() || b.size() != d.nlt())
                throw InvalidParameter("estimator state has inconsistent dimensions");
        }

        // Writes the steering vectors of path l into its blocks of h.
        void store_path(const KnownConstants &known, int l, const PathParams &p, CVector &h)
        {
            const Dims d = known.dims();
            const CMatrix H = steering_matrix(known.geom, known.ofdm, p.distance, p.aoa, p.d_ue);
            for (int k = 0; k < d.K(); ++k)
                h.segment(h_index(d, 0, l, k), d.N()) = H.col(k);
        }

        // Contribution g_l alpha^(l) . h^(l) of one path, alpha-form order.
        CVector path_term(const Dims &d, int l, Complex gl, const CVector &h, const CVector &alpha)
        {
            CVector x(d.nkt());
            for (int t = 0; t < d.T(); ++t)
                for (int k = 0; k < d.K(); ++k)
                    for (int n = 0; n < d.N(); ++n)
                        x(obs_index(d, n, k, t)) = gl * alpha(alpha_index(d, n, l, t)) * h(h_index(d, n, l, k));
            return x;
        }

        // Minimum over alpha(n, ., t) of the (n, t) share of f1 + f2, summed over t.
        // Writes the minimisers into `alpha` when it is not null.
        double antenna_cost(const ObservationTensor &y, const CVector &g, const CVector &h, const RVector &b,
                            const Variances &var, int n, CVector *alpha)
        {
            const Dims &d = y.dims;
            const double s2 = var.noise;
            CMatrix C(d.K(), d.L());
            for (int l = 0; l < d.L(); ++l)
                for (int k = 0; k < d.K(); ++k)
                    C(k, l) = g(l) * h(h_index(d, n, l, k));
            const CMatrix gram = C.adjoint() * C / s2;

            double cost = 0.0;
            for (int t = 0; t < d.T(); ++t)
            {
                CVector yk(d.K());
                for (int k = 0; k < d.K(); ++k)
                    yk(k) = y(n, k, t);
                CMatrix P = gram;
                CVector u = C.adjoint() * yk / s2;
                double prior = 0.0;
                for (int l = 0; l < d.L(); ++l)
                {
                    const double bl = b(alpha_index(d, n, l, t));
                    const double q = var.sigma_b2 * (1.0 - bl) + var.sigma_v2 * bl;
                    P(l, l) += 1.0 / q;
                    u(l) += bl / q;
                    prior += bl * bl / q;
                }
                const Eigen::LDLT<CMatrix> ldlt(P);
                const CVector a = ldlt.solve(u);
                cost += yk.squaredNorm() / s2 + prior - u.dot(a).real();
                if (alpha)
                    for (int l = 0; l < d.L(); ++l)
                        (*alpha)(alpha_index(d, n, l, t)) = a(l);
            }
            return cost;
        }

        // Applies the flips of `proposal` one (antenna, path) pair at a time,
        // strongest evidence first, keeping each only if the exact objective
        // decreases. Returns the number of flips kept.
        int accept_improving_flips(const ObservationTensor &y, const IsingParams &ising, const Variances &var,
                                   const RVector &r1, const RVector &proposal, AOState &s)
        {
            const Dims &d = y.dims;
            struct Candidate
            {
                int n;
                int l;
                double strength;
            };
            std::vector<Candidate> candidates;
            for (int l = 0; l < d.L(); ++l)
                for (int n = 0; n < d.N(); ++n)
                {
                    const Eigen::Index i = alpha_index(d, n, l, 0);
                    if (proposal(i) == s.b(i))
                        continue;
                    double evidence = 0.0;
                    for (int t = 0; t < d.T(); ++t)
                        evidence += r1(alpha_index(d, n, l, t));
                    candidates.push_back({n, l, std::abs(evidence)});
                }
            std::stable_sort(candidates.begin(), candidates.end(),
                             [](const Candidate &a, const Candidate &b) { return a.strength > b.strength; });

            int kept = 0;
            for (const Candidate &c : candidates)
            {
                RVector trial = s.b;
                double gap = 0.0;
                for (int t = 0; t < d.T(); ++t)
                {
                    const Eigen::Index i = alpha_index(d, c.n, c.l, t);
                    gap += energy_gap(ising, s.b, i);
                    trial(i) = 1.0 - trial(i);
                }
                const double change = antenna_cost(y, s.g, s.h, trial, var, c.n, nullptr) -
                                      antenna_cost(y, s.g, s.h, s.b, var, c.n, nullptr) + gap;
                if (change < 0.0)
                {
                    s.b = std::move(trial);
                    antenna_cost(y, s.g, s.h, s.b, var, c.n, &s.alpha);
                    ++kept;
                }
            }
            return kept;
        }

        // Exact block move over the L indicators of each antenna: every one of
        // the 2^L visibility patterns is scored with alpha(n, ., .) re-solved.
        // Returns the number of antennas whose pattern changed.
        int antenna_block_sweep(const ObservationTensor &y, const IsingParams &ising, const Variances &var,
                                AOState &s)
        {
            const Dims &d = y.dims;
            if (d.L() > 6)
                return 0;
            const int patterns = 1 << d.L();
            int changed = 0;
            for (int n = 0; n < d.N(); ++n)
            {
                const double base = antenna_cost(y, s.g, s.h, s.b, var, n, nullptr);
                double best_change = 0.0;
                RVector best_b;
                for (int mask = 0; mask < patterns; ++mask)
                {
                    RVector trial = s.b;
                    double gap = 0.0;
                    bool same = true;
                    for (int l = 0; l < d.L(); ++l)
                    {
                        const double want = (mask >> l) & 1 ? 1.0 : 0.0;
                        if (trial(alpha_index(d, n, l, 0)) == want)
                            continue;
                        same = false;
                        for (int t = 0; t < d.T(); ++t)
                        {
                            const Eigen::Index i = alpha_index(d, n, l, t);
                            gap += energy_gap(ising, trial, i);
                            trial(i) = want;
                        }
                    }
                    if (same)
                        continue;
                    const double change = antenna_cost(y, s.g, s.h, trial, var, n, nullptr) - base + gap;
                    if (change < best_change)
                    {
                        best_change = change;
                        best_b = std::move(trial);
                    }
                }
                if (best_b.size() > 0)
                {
                    s.b = std::move(best_b);
                    antenna_cost(y, s.g, s.h, s.b, var, n, &s.alpha);
                    ++changed;
                }
            }
            return changed;
        }

        void record(AOState &s, int it, const char *step, double before, double after, bool rejected = false,
                    bool rounding_raised = false)
        {
            s.substeps.push_back({it, step, before, after, rejected, rounding_raised});
        }
    }

    void Variances::validate() const
    {
        if (!(noise > 0.0) || !(sigma_b2 > 0.0) || !(sigma_v2 > 0.0))
            throw InvalidParameter("Variances: all variances must be positive");
    }

    KnownConstants KnownConstants::from_scene(const SceneConfig &scene)
    {
        KnownConstants k;
        k.geom = scene.geom;
        k.ofdm = scene.ofdm;
        k.n_paths = static_cast<int>(scene.paths.size());
        k.var = {scene.noise_variance, scene.sigma_b2, scene.sigma_v2};
        return k;
    }

    void AOConfig::validate() const
    {
        if (max_iterations < 1)
            throw InvalidParameter("AOConfig: max_iterations must be at least 1");
        if (!(tolerance > 0.0))
            throw InvalidParameter("AOConfig: tolerance must be positive");
        if (!(ridge >= 0.0))
            throw InvalidParameter("AOConfig: ridge must be non-negative");
        if (!(eta >= 0.0 && eta <= 0.25))
            throw InvalidParameter("AOConfig: eta must lie in [0, 0.25]");
    }

    LsSolution solve_least_squares(const CSparse &R, const CVector &y, double ridge)
    {
        if (R.rows() != y.size())
            throw InvalidParameter("solve_least_squares: regressor and observation lengths differ");
        if (!(ridge >= 0.0))
            throw InvalidParameter("solve_least_squares: ridge must be non-negative");

        const CSparse Rh = R.adjoint();
        CSparse normal = Rh * R;
        const CVector rhs = Rh * y;

        Eigen::SimplicialLDLT<CSparse> ldlt(normal);
        bool singular = ldlt.info() != Eigen::Success;
        double ratio = 0.0;
        if (!singular)
        {
            const RVector D = ldlt.vectorD().real().cwiseAbs();
            ratio = D.maxCoeff() > 0.0 ? D.minCoeff() / D.maxCoeff() : 0.0;
            singular = ratio < kSingularRatio;
        }

        LsSolution out;
        if (singular || (ratio < kIllConditionedRatio && ridge > 0.0))
        {
            if (!(ridge > 0.0))
                throw SingularSystem("least squares: normal matrix is singular and no ridge is allowed");
            const double scale = normal.diagonal().real().sum() / static_cast<double>(normal.cols());
            CSparse eye(normal.rows(), normal.cols());
            eye.setIdentity();
            normal += Complex(ridge * std::max(scale, 1e-300), 0.0) * eye;
            ldlt.compute(normal);
            if (ldlt.info() != Eigen::Success)
                throw SingularSystem("least squares: ridge-regularised system failed to factorise");
            out.ridge_engaged = true;
        }
        out.x = ldlt.solve(rhs);
        return out;
    }

    CVector step_alpha(const CVector &y_breve, const CSparse &R, const RVector &b, const Variances &var)
    {
        var.validate();
        if (R.rows() != y_breve.size() || R.cols() != b.size())
            throw InvalidParameter("step_alpha: dimension mismatch");

        const CVector mu = b.cast<Complex>();
        const RVector prior_var = var.sigma_b2 * (1.0 - b.array()) + var.sigma_v2 * b.array();
        const CSparse RS = R * prior_var.cast<Complex>().asDiagonal();
        CSparse M = RS * CSparse(R.adjoint());
        CSparse eye(M.rows(), M.cols());
        eye.setIdentity();
        M += Complex(var.noise, 0.0) * eye;

        Eigen::SimplicialLDLT<CSparse> ldlt(M);
        if (ldlt.info() != Eigen::Success)
            throw SingularSystem("step_alpha: innovation covariance failed to factorise");
        const CVector innovation = ldlt.solve(y_breve - R * mu);
        return mu + prior_var.cast<Complex>().asDiagonal() * (R.adjoint() * innovation);
    }

    ObjectiveTerms objective(const ObservationTensor &y, const CVector &g, const CVector &h, const CVector &alpha,
                             const RVector &b, const Variances &var, const IsingParams &ising)
    {
        const Dims &d = y.dims;
        check_state(d, g, h, alpha, b);
        var.validate();

        ObjectiveTerms f;
        f.f1 = (y.data - model_tensor(d, g, h, alpha).data).squaredNorm() / var.noise;
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
        {
            const double q = var.sigma_b2 * (1.0 - b(i)) + var.sigma_v2 * b(i);
            f.f2 += std::norm(alpha(i) - b(i)) / q;
        }
        f.f3 = ising_energy(ising, b);
        return f;
    }

    RVector profiled_evidence(const ObservationTensor &y, const CVector &g, const CVector &h, const CVector &alpha,
                              const Variances &var)
    {
        const Dims &d = y.dims;
        check_state(d, g, h, alpha, RVector::Zero(d.nlt()));
        var.validate();
        const double s2 = var.noise;

        RVector r1(d.nlt());
        CVector model(d.K());
        CVector c(d.K());
        for (int t = 0; t < d.T(); ++t)
            for (int n = 0; n < d.N(); ++n)
            {
                for (int k = 0; k < d.K(); ++k)
                {
                    Complex m(0.0, 0.0);
                    for (int l = 0; l < d.L(); ++l)
                        m += g(l) * alpha(alpha_index(d, n, l, t)) * h(h_index(d, n, l, k));
                    model(k) = m;
                }
                for (int l = 0; l < d.L(); ++l)
                {
                    const Complex a_nlt = alpha(alpha_index(d, n, l, t));
                    double a = 0.0;
                    Complex z(0.0, 0.0);
                    for (int k = 0; k < d.K(); ++k)
                    {
                        c(k) = g(l) * h(h_index(d, n, l, k));
                        const Complex e = y(n, k, t) - model(k) + c(k) * a_nlt;
                        a += std::norm(c(k));
                        z += std::conj(c(k)) * e;
                    }
                    // min over alpha of |e - alpha c|^2 / s2 + |alpha - mu|^2 / v, up to ||e||^2 / s2,
                    // equals |mu|^2 / v - |z / s2 + mu / v|^2 / (a / s2 + 1 / v).
                    const double p1 = a / s2 + 1.0 / var.sigma_v2;
                    const Complex u1 = z / s2 + 1.0 / var.sigma_v2;
                    const double p0 = a / s2 + 1.0 / var.sigma_b2;
                    const Complex u0 = z / s2;
                    const double visible = 1.0 / var.sigma_v2 - std::norm(u1) / p1;
                    const double blocked = -std::norm(u0) / p0;
                    r1(alpha_index(d, n, l, t)) = visible - blocked;
                }
            }
        return r1;
    }

    bool refine_path(const ObservationTensor &y, const KnownConstants &known, int l, const CVector &alpha,
                     const PolishBox &box, CVector &g, CVector &h, std::vector<PathParams> &paths)
    {
        const Dims d = known.dims();
        if (l < 0 || l >= d.L() || static_cast<int>(paths.size()) != d.L())
            throw InvalidParameter("refine_path: path index or parameter list out of range");

        // Partial residual z = y - sum_{l' != l} g_l' alpha^(l') . h^(l').
        const CVector own = path_term(d, l, g(l), h, alpha);
        const CVector z = y.data - model_tensor(d, g, h, alpha).data + own;

        PathData data;
        data.v = CMatrix::Zero(d.N(), d.K());
        data.weight = RVector::Zero(d.N());
        for (int t = 0; t < d.T(); ++t)
            for (int n = 0; n < d.N(); ++n)
            {
                const Complex a = alpha(alpha_index(d, n, l, t));
                data.weight(n) += std::norm(a);
                for (int k = 0; k < d.K(); ++k)
                    data.v(n, k) += std::conj(a) * z(obs_index(d, n, k, t));
            }
        data.energy = z.squaredNorm();

        PolishBox b = box;
        if (l == 0)
            b.fix_due = true;
        PathPoint start;
        start.theta = paths[l].aoa;
        start.distance = paths[l].distance;
        start.d_ue = l == 0 ? 0.0 : paths[l].d_ue;
        const PathPoint best = polish(known.geom, known.ofdm, data, FitCriterion::ProfiledGain, start, b);

        PathParams candidate = paths[l];
        candidate.aoa = best.theta;
        candidate.distance = best.distance;
        candidate.d_ue = best.d_ue;
        candidate.gain = best.gain(FitCriterion::ProfiledGain);

        CVector h_new = h;
        store_path(known, l, candidate, h_new);
        const double old_misfit = (z - own).squaredNorm();
        const double new_misfit = (z - path_term(d, l, candidate.gain, h_new, alpha)).squaredNorm();
        if (!(new_misfit < old_misfit))
            return false;
        paths[l] = candidate;
        g(l) = candidate.gain;
        h = std::move(h_new);
        return true;
    }

    AOState default_init(const ObservationTensor &y, const KnownConstants &known, const SteeringDictionary &dict,
                         double ridge)
    {
        const Dims d = known.dims();
        d.validate();
        if (y.dims != d || y.data.size() != d.nkt())
            throw InvalidParameter("default_init: observation does not match the known constants");

        std::vector<PathParams> found;
        CVector residual = y.data;
        for (int l = 0; l < d.L(); ++l)
        {
            PathData data;
            data.v = CMatrix::Zero(d.N(), d.K());
            data.weight = RVector::Constant(d.N(), d.T());
            for (int t = 0; t < d.T(); ++t)
                for (int k = 0; k < d.K(); ++k)
                    for (int n = 0; n < d.N(); ++n)
                        data.v(n, k) += residual(obs_index(d, n, k, t));
            const PathPoint winner = coarse_search(dict, data, FitCriterion::ProfiledGain, {0.0});
            found.push_back({winner.gain(FitCriterion::ProfiledGain), winner.distance, winner.theta, 0.0});

            // Joint gains of the paths found so far, then cancel them.
            Dims sub = d;
            sub.n_paths = l + 1;
            const CVector h_sub = stacked_steering(known.geom, known.ofdm, found);
            const CVector ones = CVector::Ones(sub.nlt());
            const CSparse R = regressor_g_form(sub, h_sub, ones);
            const CVector g_sub = solve_least_squares(R, stack_observations(StackTag::GForm, y), ridge).x;
            for (int i = 0; i <= l; ++i)
                found[static_cast<std::size_t>(i)].gain = g_sub(i);
            residual = y.data - model_tensor(sub, g_sub, h_sub, ones).data;
        }

        AOState s;
        s.dims = d;
        s.paths = found;
        s.h = stacked_steering(known.geom, known.ofdm, found);
        s.alpha = CVector::Ones(d.nlt());
        s.b = RVector::Ones(d.nlt());
        s.b_relaxed = s.b;
        const LsSolution g = step_g(stack_observations(StackTag::GForm, y), regressor_g_form(d, s.h, s.alpha), ridge);
        s.g = g.x;
        for (int l = 0; l < d.L(); ++l)
            s.paths[static_cast<std::size_t>(l)].gain = s.g(l);
        s.ridge_engagements = g.ridge_engaged ? 1 : 0;
        return s;
    }

    AOState state_from_truth(const ObservationSet &obs)
    {
        const Dims d = obs.scene.dims();
        AOState s;
        s.dims = d;
        s.paths = obs.scene.paths;
        s.g = gains_of(obs.scene.paths);
        s.h = stacked_steering(obs.scene.geom, obs.scene.ofdm, obs.scene.paths);
        s.alpha = obs.sns.alpha;
        s.b = obs.vr.expanded(d.T());
        s.b_relaxed = s.b;
        return s;
    }

    AOState run_ao(const ObservationTensor &y, const KnownConstants &known, const IsingParams &ising,
                   const AOConfig &config, AOState s)
    {
        config.validate();
        known.var.validate();
        const Dims d = known.dims();
        if (y.dims != d)
            throw InvalidParameter("run_ao: observation does not match the known constants");
        check_state(d, s.g, s.h, s.alpha, s.b);
        if (ising.size() != d.nlt())
            throw InvalidParameter("run_ao: Ising parameters do not match NLT");
        if (config.h_update == HUpdate::Parametric && static_cast<int>(s.paths.size()) != d.L())
            throw InvalidParameter("run_ao: parametric h-update needs per-path parameters in the initial state");
        if (s.b_relaxed.size() != d.nlt())
            s.b_relaxed = s.b;

        const Variances &var = known.var;
        const CVector y_bar = stack_observations(StackTag::GForm, y);
        const CVector y_tilde = stack_observations(StackTag::HForm, y);
        const CVector &y_breve = y.data;

        s.history.clear();
        s.substeps.clear();
        s.iterations = 0;
        s.converged = false;
        ObjectiveTerms current = objective(y, s, var, ising);
        s.history.push_back(current);

        for (int it = 1; it <= config.max_iterations; ++it)
        {
            const double previous = current.total();

            // g-step
            double before = current.total();
            const LsSolution g = step_g(y_bar, regressor_g_form(d, s.h, s.alpha), config.ridge);
            s.g = g.x;
            s.ridge_engagements += g.ridge_engaged ? 1 : 0;
            for (int l = 0; l < d.L() && l < static_cast<int>(s.paths.size()); ++l)
                s.paths[static_cast<std::size_t>(l)].gain = s.g(l);
            current = objective(y, s, var, ising);
            record(s, it, "g", before, current.total());

            // h-step
            before = current.total();
            if (config.h_update == HUpdate::Parametric)
            {
                for (int l = 0; l < d.L(); ++l)
                    refine_path(y, known, l, s.alpha, config.refine, s.g, s.h, s.paths);
            }
            else
            {
                const LsSolution h = step_h(y_tilde, regressor_h_form(d, s.g, s.alpha), config.ridge);
                s.h = h.x;
                s.ridge_engagements += h.ridge_engaged ? 1 : 0;
            }
            current = objective(y, s, var, ising);
            record(s, it, "h", before, current.total());

            // alpha-step
            before = current.total();
            const CSparse R_breve = regressor_alpha_form(d, s.g, s.h);
            s.alpha = step_alpha(y_breve, R_breve, s.b, var);
            current = objective(y, s, var, ising);
            record(s, it, "alpha", before, current.total());

            // b-step
            before = current.total();
            const RVector r1 = config.b_evidence == BEvidence::Profiled
                                   ? profiled_evidence(y, s.g, s.h, s.alpha, var)
                                   : evidence_from_alpha(s.alpha, var.sigma_b2, var.sigma_v2);
            const QpProblem qp = make_qp(ising, r1, config.eta);
            const QpResult res = config.warm_start_b ? step_b(qp, config.qp, s.b_relaxed) : step_b(qp, config.qp);
            s.b_relaxed = res.relaxed;
            s.qp_warnings += res.converged ? 0 : 1;
            bool rejected = false;
            const bool raised = res.rounded != s.b &&
                                objective(y, s.g, s.h, s.alpha, res.rounded, var, ising).total() >
                                    before + 1e-9 * std::abs(before);
            if (res.rounded != s.b)
            {
                if (config.guard_b)
                {
                    accept_improving_flips(y, ising, var, r1, res.rounded, s);
                    antenna_block_sweep(y, ising, var, s);
                    const int remaining = static_cast<int>((res.rounded - s.b).cwiseAbs().sum() / d.T() + 0.5);
                    rejected = remaining > 0;
                    s.b_rejections += remaining;
                }
                else
                    s.b = res.rounded;
                current = objective(y, s, var, ising);
            }
            record(s, it, "b", before, current.total(), rejected, raised);

            s.history.push_back(current);
            s.iterations = it;
            if (std::abs(current.total() - previous) <= config.tolerance * std::abs(previous))
            {
                s.converged = true;
                break;
            }
        }
        return s;
    }

    void write_trace_csv(std::ostream &out, const AOState &state)
    {
        out << "iteration,f1,f2,f3,total\n";
        char line[160];
        for (std::size_t i = 0; i < state.history.size(); ++i)
        {
            const ObjectiveTerms &f = state.history[i];
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, f.f1, f.f2, f.f3, f.total());
            out << line;
        }
    }
}
