// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "elaa/ising.hpp"
#include "elaa/oracles.hpp"

#include <random>

using namespace elaa;

namespace
{
    RVector random_binary(std::mt19937_64 &rng, Eigen::Index n)
    {
        std::bernoulli_distribution coin(0.5);
        RVector b(n);
        for (Eigen::Index i = 0; i < n; ++i)
            b(i) = coin(rng) ? 1.0 : 0.0;
        return b;
    }
}

TEST_SUITE("ising")
{
    TEST_CASE("three-antenna chain")
    {
        const IsingParams p = default_chain_params(3, 1, 1, 1.0, 0.0);
        RMatrix expected(3, 3);
        expected << 0, -1, 0, -1, 0, -1, 0, -1, 0;
        CHECK(p.path_interaction(0) == expected);
        CHECK(RMatrix(p.assemble_interaction()) == expected);

        CHECK(ising_energy(p, RVector::Ones(3)) == doctest::Approx(-2.0));
        CHECK(ising_energy(p, RVector::Zero(3)) == doctest::Approx(-2.0));
        CHECK(ising_energy(p, (RVector(3) << 1, 0, 1).finished()) == doctest::Approx(2.0));
        CHECK(ising_energy(p, (RVector(3) << 1, 1, 0).finished()) == doctest::Approx(0.0));
    }

    TEST_CASE("bias only: energy is linear in s")
    {
        IsingParams p;
        p.n_antennas = 4;
        p.n_paths = 1;
        p.n_snapshots = 1;
        p.edges.resize(1);
        p.gamma = (RMatrix(4, 1) << 0.5, -1.0, 2.0, 0.0).finished();
        p.index_neighbors();
        const RVector b = (RVector(4) << 1, 0, 0, 1).finished();
        CHECK(ising_energy(p, b) == doctest::Approx(0.5 + 1.0 - 2.0 + 0.0));
        CHECK(ising_energy_edge_sum(p, b) == doctest::Approx(-0.5));
    }

    TEST_CASE("flip gaps of the default prior")
    {
        const double beta0 = 1.0, gamma0 = -0.2;
        const IsingParams p = default_chain_params(6, 1, 1, beta0, gamma0);
        RVector b = RVector::Ones(6);
        // Interior flip breaks two aligned bonds and opposes the bias.
        CHECK(energy_gap(p, b, 2) == doctest::Approx(4.0 * beta0 - 2.0 * gamma0));
        // End flip breaks one bond.
        CHECK(energy_gap(p, b, 0) == doctest::Approx(2.0 * beta0 - 2.0 * gamma0));
        // Growing a blocked run by one at its edge costs only the bias.
        b(2) = 0.0;
        b(3) = 0.0;
        CHECK(energy_gap(p, b, 4) == doctest::Approx(-2.0 * gamma0));
    }

    TEST_CASE("energy_gap matches the energy difference on random flips")
    {
        std::mt19937_64 rng(13);
        const IsingParams p = default_chain_params(12, 2, 3, 0.7, -0.3);
        std::uniform_int_distribution<Eigen::Index> pick(0, p.size() - 1);
        for (int trial = 0; trial < 100; ++trial)
        {
            RVector b = random_binary(rng, p.size());
            const Eigen::Index i = pick(rng);
            const double before = ising_energy(p, b);
            const double gap = energy_gap(p, b, i);
            b(i) = 1.0 - b(i);
            CHECK(gap == doctest::Approx(ising_energy(p, b) - before).epsilon(1e-12));
        }
    }

    TEST_CASE("matrix energy equals the edge-sum oracle")
    {
        std::mt19937_64 rng(3);
        const IsingParams p = default_chain_params(7, 3, 2, 1.3, 0.4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial)
        {
            RVector b = random_binary(rng, p.size());
            if (trial % 2)
                for (Eigen::Index i = 0; i < b.size(); ++i)
                    b(i) = u(rng); // relaxed points too
            const double oracle_value = oracle::ising_energy(p, b);
            CHECK(ising_energy(p, b) == doctest::Approx(oracle_value).epsilon(1e-12));
            CHECK(ising_energy_edge_sum(p, b) == doctest::Approx(oracle_value).epsilon(1e-12));
        }
    }

    TEST_CASE("assembled interaction is I_T (x) blkdiag(E~) built explicitly")
    {
        const int N = 2, L = 3, T = 2;
        const IsingParams p = default_chain_params(N, L, T, 1.0, -0.2);
        RMatrix explicit_E = RMatrix::Zero(N * L * T, N * L * T);
        for (int t = 0; t < T; ++t)
            for (int l = 0; l < L; ++l)
            {
                const int o = N * (l + L * t);
                explicit_E(o, o + 1) = explicit_E(o + 1, o) = -1.0;
            }
        CHECK(RMatrix(p.assemble_interaction()) == explicit_E);
        CHECK(p.assemble_bias() == RVector::Constant(N * L * T, -0.2));
    }

    TEST_CASE("prior minimizers without evidence")
    {
        // Ferromagnetic chain with a visibility bias: the unique minimizer is all-visible.
        const IsingParams p = default_chain_params(10, 1, 1, 1.0, -0.2);
        const auto minima = oracle::ising_minimizers(p);
        REQUIRE(minima.size() == 1);
        CHECK(minima[0] == RVector::Ones(10));
        // Without bias both aligned states are minimizers.
        const auto both = oracle::ising_minimizers(default_chain_params(10, 1, 1, 1.0, 0.0));
        CHECK(both.size() == 2);
    }

    TEST_CASE("validation")
    {
        CHECK_THROWS_AS(default_chain_params(5, 1, 1, 0.0, 0.0), InvalidParameter);
        IsingParams p = default_chain_params(4, 1, 1, 1.0, 0.0);
        p.edges[0].push_back({2, 2, 1.0});
        CHECK_THROWS_AS(p.validate(), InvalidParameter);
        const IsingParams q = default_chain_params(4, 1, 1, 1.0, 0.0);
        CHECK_THROWS_AS(ising_energy(q, RVector::Ones(5)), InvalidParameter);
    }
}
