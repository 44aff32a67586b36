// SPDX-License-Identifier: Apache-2.0

#include "elaa/selftest.hpp"

#include "elaa/ao.hpp"
#include "elaa/oracles.hpp"
#include "elaa/qp.hpp"
#include "elaa/stacking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

namespace elaa
{
    namespace
    {
        std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0)
        {
            char buf[256];
            std::snprintf(buf, sizeof buf, pattern, a, b, c);
            return buf;
        }

        CVector random_complex(Rng &rng, Eigen::Index n, double scale = 1.0)
        {
            CVector v(n);
            for (Eigen::Index i = 0; i < n; ++i)
                v(i) = complex_normal(rng, 0.0, scale);
            return v;
        }

        double relative_error(const CVector &a, const CVector &b)
        {
            const double ref = std::max(b.norm(), 1e-300);
            return (a - b).norm() / ref;
        }

        // Largest entrywise deviation relative to the largest reference entry.
        double entrywise_error(const CVector &a, const CVector &b)
        {
            return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
        }

        // Chain prior on N antennas, L paths, T snapshots.
        QpProblem chain_qp(int N, int L, int T, double beta0, double gamma0, const RVector &r1, double eta = 0.05)
        {
            IsingParams ising = default_chain_params(N, L, T, beta0 > 0.0 ? beta0 : 1.0, gamma0);
            if (beta0 == 0.0)
            {
                for (auto &edges : ising.edges)
                    edges.clear();
                ising.index_neighbors();
            }
            return make_qp(ising, r1, eta);
        }

        bool same_binary(const RVector &a, const RVector &b)
        {
            return a.size() == b.size() && ((a - b).array().abs() < 0.5).all();
        }
    }

    CheckResult check_geometry()
    {
        CheckResult res{"geometry", true, {}};
        const SceneConfig scene = reference_scene();
        double worst = 0.0;
        for (const PathParams &p : scene.paths)
            for (int n = 1; n <= scene.geom.n_antennas; ++n)
            {
                const double a = antenna_distance(scene.geom, p.distance, p.aoa, n);
                const double b = oracle::antenna_distance(scene.geom, p.distance, p.aoa, n);
                worst = std::max(worst, std::abs(a - b) / b);
                for (int k = 1; k <= scene.ofdm.n_subcarriers; k += 3)
                {
                    const Complex h = steering_vector(scene.geom, scene.ofdm, p, k)(n - 1);
                    const Complex o = oracle::steering_entry(scene.geom, scene.ofdm, p, n, k);
                    worst = std::max(worst, std::abs(h - o));
                }
            }
        const double d100 = oracle::antenna_distance(scene.geom, 10.0, deg2rad(15.0), 100);
        const double d1 = oracle::antenna_distance(scene.geom, 10.0, deg2rad(15.0), 1);
        res.passed = worst < 1e-9 && std::abs(d100 - 9.93882) < 5e-6 && std::abs(d1 - 10.06690) < 5e-6;
        res.detail = fmt("max deviation %.3g, d_100 = %.6f m, d_1 = %.6f m", worst, d100, d1);
        return res;
    }

    CheckResult check_qp_oracle(int instances, std::uint64_t seed)
    {
        CheckResult res{"qp-oracle", true, {}};
        Rng rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        // Fixed suite: exact optimum required.
        int fixed_fail = 0;
        int fixed_total = 0;
        auto fixed = [&](const QpProblem &qp, const RVector *expected)
        {
            ++fixed_total;
            const QpResult out = step_b(qp);
            const oracle::BinaryOptimum best = oracle::qp_minimum(qp);
            const bool exact = std::abs(oracle::qp_objective(qp, out.rounded) - best.value) <=
                               1e-9 * std::max(1.0, std::abs(best.value));
            const bool matches = !expected || same_binary(out.rounded, *expected);
            if (!exact || !matches)
                ++fixed_fail;
        };
        {
            // E = 0: separable, b_i = 1 iff r_i < 0.
            RVector r1(6);
            r1 << -1.0, 2.0, -0.5, 0.3, -3.0, 0.1;
            const QpProblem qp = chain_qp(6, 1, 1, 0.0, 0.0, r1);
            RVector expected(6);
            expected << 1, 0, 1, 0, 1, 0;
            fixed(qp, &expected);
        }
        {
            CVector alpha(4);
            alpha << 1.0, 1.0, 0.05, 0.02;
            const RVector r1 = evidence_from_alpha(alpha, 1e-2, 1e-4);
            const QpProblem qp = chain_qp(4, 1, 1, 0.5, 0.0, r1);
            RVector expected(4);
            expected << 1, 1, 0, 0;
            fixed(qp, &expected);
        }
        {
            // Interior blocked run under a strong chain prior, two snapshots.
            CVector alpha = CVector::Ones(8 * 2);
            for (int t = 0; t < 2; ++t)
                for (int n = 3; n <= 5; ++n)
                    alpha(n + 8 * t) = 0.1;
            const RVector r1 = evidence_from_alpha(alpha, 1e-2, 1e-3);
            fixed(chain_qp(8, 1, 2, 1.0, -0.2, r1), nullptr);
        }
        {
            // Two paths, weak evidence against one isolated antenna: the prior wins.
            RVector r1 = RVector::Constant(10, -1.0);
            r1(2) = 0.5;
            fixed(chain_qp(5, 2, 1, 1.0, 0.0, r1), nullptr);
        }

        // Random suite.
        const std::array<std::array<int, 3>, 8> shapes{{{4, 1, 1}, {5, 2, 2}, {6, 2, 1}, {10, 2, 1},
                                                        {8, 1, 2}, {20, 1, 1}, {5, 1, 4}, {3, 3, 2}}};
        int random_fail = 0;
        double worst = 0.0;
        for (int i = 0; i < instances; ++i)
        {
            const auto &s = shapes[static_cast<std::size_t>(i) % shapes.size()];
            const int N = s[0], L = s[1], T = s[2];
            const double beta0 = 0.2 + 1.8 * unit(rng);
            const double gamma0 = unit(rng) - 0.5;
            const double sb2 = 0.2 + 0.8 * unit(rng);
            const double sv2 = 0.05 + 0.1 * unit(rng);

            // Amplitudes around a random clustered visibility pattern.
            CVector alpha(Eigen::Index(N) * L * T);
            for (int l = 0; l < L; ++l)
            {
                const int first = static_cast<int>(unit(rng) * N);
                const int len = static_cast<int>(unit(rng) * (N / 2 + 1));
                for (int t = 0; t < T; ++t)
                    for (int n = 0; n < N; ++n)
                    {
                        const bool blocked = n >= first && n < first + len;
                        alpha(n + N * (l + L * t)) = complex_normal(rng, blocked ? 0.0 : 1.0, 0.3);
                    }
            }
            const QpProblem qp = chain_qp(N, L, T, beta0, gamma0, evidence_from_alpha(alpha, sb2, sv2));
            const QpResult out = step_b(qp);
            const oracle::BinaryOptimum best = oracle::qp_minimum(qp);
            const double gap =
                (oracle::qp_objective(qp, out.rounded) - best.value) / std::max(std::abs(best.value), 1e-12);
            worst = std::max(worst, gap);
            if (gap > 0.05)
                ++random_fail;
        }
        res.passed = fixed_fail == 0 && random_fail == 0;
        res.detail = fmt("fixed suite %g/%g exact; random suite %g", fixed_total - fixed_fail, fixed_total,
                         instances - random_fail) +
                     fmt("/%g within 5%% (worst relative gap %.3g)", instances, worst);
        return res;
    }

    CheckResult check_lmmse_oracle(int instances, std::uint64_t seed)
    {
        CheckResult res{"lmmse-oracle", true, {}};
        Rng rng(seed);
        std::uniform_int_distribution<int> pickN(2, 4), pickK(1, 2), pickT(1, 4), pickL(1, 3);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < instances; ++i)
        {
            Dims d{pickN(rng), pickK(rng), pickT(rng), pickL(rng)};
            if (d.nkt() > 64)
                d.n_snapshots = 1;
            const CVector g = random_complex(rng, d.L());
            const CVector h = random_complex(rng, d.nlk());
            RVector b(d.nlt());
            for (Eigen::Index j = 0; j < b.size(); ++j)
                b(j) = unit(rng) < 0.7 ? 1.0 : 0.0;
            Variances var;
            var.noise = 0.01 + unit(rng);
            var.sigma_b2 = 1e-2;
            var.sigma_v2 = 1e-4 + 1e-2 * unit(rng);
            const CSparse R = regressor_alpha_form(d, g, h);
            const CVector y = random_complex(rng, d.nkt(), 2.0);

            const CVector a = step_alpha(y, R, b, var);
            const RVector s = var.sigma_b2 * (1.0 - b.array()) + var.sigma_v2 * b.array();
            const CVector o = oracle::posterior_mean(CMatrix(R), y, b.cast<Complex>(), s, var.noise);
            worst = std::max(worst, relative_error(a, o));
        }
        res.passed = worst <= 1e-8;
        res.detail = fmt("%g instances, worst relative error %.3g", instances, worst);
        return res;
    }

    CheckResult check_least_squares_oracle(int instances, std::uint64_t seed)
    {
        CheckResult res{"least-squares-oracle", true, {}};
        Rng rng(seed);
        std::uniform_int_distribution<int> pickN(4, 6), pickK(1, 3), pickT(1, 3), pickL(1, 3);
        double worst = 0.0;
        for (int i = 0; i < instances; ++i)
        {
            const Dims d{pickN(rng), pickK(rng), pickT(rng), pickL(rng)};
            const CVector h = random_complex(rng, d.nlk());
            const CVector alpha = random_complex(rng, d.nlt());
            const CSparse R = regressor_g_form(d, h, alpha);
            const CVector y = random_complex(rng, d.nkt());
            const CVector x = solve_least_squares(R, y, 0.0).x;
            worst = std::max(worst, relative_error(x, oracle::least_squares(CMatrix(R), y)));
        }
        res.passed = worst <= 1e-8;
        res.detail = fmt("%g instances, worst relative error %.3g", instances, worst);
        return res;
    }

    CheckResult check_stacking(int scenes, std::uint64_t seed)
    {
        CheckResult res{"stacking", true, {}};
        Rng rng(seed);
        std::uniform_int_distribution<int> pickN(2, 6), pickK(1, 3), pickT(1, 3), pickL(1, 3);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const StackTag tags[] = {StackTag::AlphaForm, StackTag::HForm, StackTag::GForm};
        double worst = 0.0;
        bool perms_exact = true;
        for (int i = 0; i < scenes; ++i)
        {
            ArrayGeometry geom{pickN(rng), 0.005};
            OfdmConfig ofdm;
            ofdm.n_subcarriers = pickK(rng);
            ofdm.n_snapshots = pickT(rng);
            const int L = pickL(rng);
            std::vector<PathParams> paths;
            for (int l = 0; l < L; ++l)
                paths.push_back({complex_normal(rng, 0.0, 1.0), 3.0 + 17.0 * unit(rng),
                                 deg2rad(120.0 * unit(rng) - 60.0), l == 0 ? 0.0 : 10.0 * unit(rng)});
            const Dims d{geom.n_antennas, ofdm.n_subcarriers, ofdm.n_snapshots, L};
            SnSField sns{d, CVector(d.nlt())};
            for (Eigen::Index j = 0; j < d.nlt(); ++j)
                sns.alpha(j) = complex_normal(rng, 1.0, 0.1);

            std::vector<CMatrix> steering;
            for (const PathParams &p : paths)
                steering.push_back(steering_matrix(geom, ofdm, p.distance, p.aoa, p.d_ue));
            const CVector direct = oracle::model(steering, paths, sns.alpha, ofdm.n_snapshots);
            const ObservationTensor tensor{d, direct};
            for (StackTag tag : tags)
            {
                const StackedModel m = build_stacked_model(tag, paths, sns, geom, ofdm);
                const CVector back = apply_permutation(permutation_between_stackings(tag, StackTag::AlphaForm, d),
                                                       m.observation);
                worst = std::max(worst, entrywise_error(back, direct));
                worst = std::max(worst, entrywise_error(m.regressor * m.parameters, m.observation));
                const CVector stacked = stack_observations(tag, tensor);
                const CVector moved = apply_permutation(permutation_between_stackings(StackTag::AlphaForm, tag, d),
                                                        stack_observations(StackTag::AlphaForm, tensor));
                if (stacked != moved)
                    perms_exact = false;
                for (StackTag other : tags)
                {
                    const CVector there = apply_permutation(permutation_between_stackings(tag, other, d), stacked);
                    const CVector round = apply_permutation(permutation_between_stackings(other, tag, d), there);
                    if (round != stacked || there != stack_observations(other, tensor))
                        perms_exact = false;
                }
            }
        }
        res.passed = worst <= 1e-12 && perms_exact;
        res.detail = fmt("%g scenes, worst entrywise relative error %.3g, permutations ", scenes, worst) +
                     (perms_exact ? "exact" : "INEXACT");
        return res;
    }

    CheckResult check_ising_clustering(int max_n, std::uint64_t seed)
    {
        CheckResult res{"ising-clustering", true, {}};
        Rng rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        int structure_fail = 0;
        for (int N = 2; N <= max_n; ++N)
        {
            IsingParams p = default_chain_params(N, 1, 1, 1.0, 0.0);
            for (auto &e : p.edges[0])
                e.beta = -(0.1 + 2.0 * unit(rng));
            p.index_neighbors();
            const std::vector<RVector> mins = oracle::ising_minimizers(p);
            const bool uniform = mins.size() == 2 && (mins[0].array() == mins[0](0)).all() &&
                                 (mins[1].array() == mins[1](0)).all() && mins[0](0) != mins[1](0);
            if (!uniform)
                ++structure_fail;
        }

        // Quadratic form, edge sum and oracle on every configuration.
        double worst = 0.0;
        long configs = 0;
        auto compare_all = [&](IsingParams p)
        {
            p.index_neighbors();
            const Eigen::Index free = Eigen::Index(p.n_antennas) * p.n_paths;
            RVector b(p.size());
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << free); ++mask)
            {
                for (Eigen::Index i = 0; i < b.size(); ++i)
                    b(i) = (mask >> (i % free)) & 1U ? 1.0 : 0.0;
                const double q = ising_energy(p, b);
                const double e = ising_energy_edge_sum(p, b);
                const double o = oracle::ising_energy(p, b);
                const double scale = std::max(1.0, std::abs(o));
                worst = std::max({worst, std::abs(q - o) / scale, std::abs(e - o) / scale});
                ++configs;
            }
        };
        for (int N = 1; N <= 6; ++N)
        {
            IsingParams p = default_chain_params(N, 1, 1, 1.0, 0.0);
            for (auto &e : p.edges[0])
                e.beta = 4.0 * unit(rng) - 2.0;
            for (int n = 0; n < N; ++n)
                p.gamma(n, 0) = unit(rng) - 0.5;
            compare_all(p);
        }
        {
            IsingParams p = default_chain_params(3, 2, 2, 0.7, -0.3);
            p.gamma(1, 1) = 0.4;
            compare_all(p);
        }
        res.passed = structure_fail == 0 && worst <= 1e-12;
        res.detail = fmt("uniform minimizers for N = 2..%g: ", max_n) +
                     (structure_fail ? "FAILED" : "yes") +
                     fmt("; quadratic vs edge-sum on %g configurations, worst deviation %.3g", double(configs), worst);
        return res;
    }

    CheckResult check_fraunhofer(const SceneConfig &scene)
    {
        CheckResult res{"fraunhofer", true, {}};
        const double D = (scene.geom.n_antennas - 1) * scene.geom.spacing;
        const double lambda = scene.ofdm.speed_of_light / scene.ofdm.carrier;
        const double direct = 2.0 * D * D / lambda;
        const double lib = fraunhofer_distance(scene.geom, scene.ofdm);
        bool near = true;
        for (const auto &p : scene.paths)
            near = near && p.distance < lib;
        res.passed = std::abs(lib - direct) <= 1e-12 * direct && std::abs(lib - 49.0) <= 0.49 &&
                     std::abs(lib - 50.0) <= 2.5 && near;
        res.detail = fmt("2D^2/lambda = %.4f m (D = %.4f m, lambda = %.4g m)", lib, D, lambda) +
                     (near ? ", every path in the near field" : ", some path beyond it");
        return res;
    }

    std::vector<CheckResult> run_selftest(const SceneConfig &scene)
    {
        return {check_geometry(),     check_qp_oracle(),        check_lmmse_oracle(), check_least_squares_oracle(),
                check_stacking(),     check_ising_clustering(), check_fraunhofer(scene)};
    }
}
