// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "elaa/oracles.hpp"
#include "elaa/qp.hpp"

#include <random>

using namespace elaa;

TEST_SUITE("qp")
{
    TEST_CASE("no interaction: the sign of r decides")
    {
        QpProblem qp;
        qp.E = RSparse(6, 6);
        qp.r = (RVector(6) << -1, 1, -2, 0.5, -0.1, 3).finished();
        qp.eta = RVector::Constant(6, 0.01);
        const QpResult res = step_b(qp);
        CHECK(res.rounded == (RVector(6) << 1, 0, 1, 0, 1, 0).finished());
        CHECK(res.objective == doctest::Approx(-3.1));
        CHECK(res.converged);
    }

    TEST_CASE("four antennas with two weak amplitudes")
    {
        const IsingParams ising = default_chain_params(4, 1, 1, 1.0, -0.2);
        const CVector alpha = (CVector(4) << 1.0, 1.0, 0.05, 0.02).finished();
        const RVector r1 = evidence_from_alpha(alpha, 1e-2, 1e-4);
        // Visible entries: r1 = -100; weak ones: about 9000 - 0.25.
        CHECK(r1(0) == doctest::Approx(-100.0));
        CHECK(r1(2) == doctest::Approx(0.95 * 0.95 / 1e-4 - 0.0025 / 1e-2));
        const QpProblem qp = make_qp(ising, r1, 0.01);
        const QpResult res = step_b(qp);
        CHECK(res.rounded == (RVector(4) << 1, 1, 0, 0).finished());
        const auto best = oracle::qp_minimum(qp);
        CHECK(res.objective == doctest::Approx(best.value).epsilon(1e-12));
    }

    TEST_CASE("QP objective equals the Ising energy up to a constant")
    {
        const IsingParams ising = default_chain_params(5, 2, 2, 0.8, -0.3);
        const QpProblem qp = make_qp(ising, RVector::Zero(ising.size()), 0.25);
        std::mt19937_64 rng(5);
        std::bernoulli_distribution coin(0.5);
        const double offset = qp_objective(qp, RVector::Zero(ising.size())) - ising_energy(ising, RVector::Zero(ising.size()));
        for (int trial = 0; trial < 20; ++trial)
        {
            RVector b(ising.size());
            for (Eigen::Index i = 0; i < b.size(); ++i)
                b(i) = coin(rng);
            CHECK(qp_objective(qp, b) - ising_energy(ising, b) == doctest::Approx(offset).epsilon(1e-12));
            CHECK(qp_objective(qp, b) == doctest::Approx(oracle::qp_objective(qp, b)).epsilon(1e-12));
        }
    }

    TEST_CASE("near-binary constraint and surrogate descent")
    {
        const IsingParams ising = default_chain_params(20, 2, 3, 1.0, -0.2);
        std::mt19937_64 rng(12);
        std::normal_distribution<double> gauss(0.0, 3.0);
        RVector r1(ising.size());
        for (Eigen::Index i = 0; i < r1.size(); ++i)
            r1(i) = gauss(rng);
        const double eta = 0.01;
        const QpProblem qp = make_qp(ising, r1, eta);
        const QpResult res = step_b(qp);
        REQUIRE(res.converged);
        for (Eigen::Index i = 0; i < res.relaxed.size(); ++i)
        {
            CHECK(res.relaxed(i) >= 0.0);
            CHECK(res.relaxed(i) <= 1.0);
            CHECK(res.relaxed(i) * (1.0 - res.relaxed(i)) <= eta + 1e-15);
        }
        // Tied across snapshots.
        const Eigen::Index nl = 40;
        CHECK(res.rounded.segment(nl, nl) == res.rounded.head(nl));
        CHECK(res.rounded.segment(2 * nl, nl) == res.rounded.head(nl));

        // The penalized surrogate never increases within a penalty level.
        std::vector<int> starts = res.level_starts;
        starts.push_back(static_cast<int>(res.surrogate.size()));
        for (std::size_t lv = 0; lv + 1 < starts.size(); ++lv)
            for (int i = starts[lv] + 1; i < starts[lv + 1]; ++i)
                CHECK(res.surrogate[i] <= res.surrogate[i - 1] + 1e-12 * std::abs(res.surrogate[i - 1]));
    }

    TEST_CASE("rounded solution is never worse than its single-flip neighbours")
    {
        const IsingParams ising = default_chain_params(10, 2, 1, 1.0, -0.2);
        std::mt19937_64 rng(44);
        std::normal_distribution<double> gauss(0.0, 2.0);
        for (int trial = 0; trial < 10; ++trial)
        {
            RVector r1(ising.size());
            for (Eigen::Index i = 0; i < r1.size(); ++i)
                r1(i) = gauss(rng);
            const QpProblem qp = make_qp(ising, r1, 0.01);
            const QpResult res = step_b(qp);
            for (Eigen::Index i = 0; i < res.rounded.size(); ++i)
            {
                RVector flipped = res.rounded;
                flipped(i) = 1.0 - flipped(i);
                CHECK(qp_objective(qp, flipped) >= res.objective - 1e-9);
            }
        }
    }

    TEST_CASE("validation")
    {
        QpProblem qp;
        qp.E = RSparse(3, 3);
        qp.r = RVector::Zero(3);
        qp.eta = RVector::Constant(3, 0.3);
        CHECK_THROWS_AS(step_b(qp), InvalidParameter);
        qp.eta = RVector::Constant(3, 0.1);
        qp.replicas = 2;
        CHECK_THROWS_AS(step_b(qp), InvalidParameter);
        CHECK_THROWS_AS(evidence_from_alpha(CVector::Ones(2), 0.0, 1.0), InvalidParameter);
    }
}
