// SPDX-License-Identifier: Apache-2.0
//
// Randomized cross-checks of the estimator building blocks against the
// reference implementations in oracles.hpp.

#pragma once

#include "elaa/synth.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace elaa
{
    struct CheckResult
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    /// Antenna distances and steering entries against Cartesian evaluation.
    CheckResult check_geometry();

    /// step_b on random instances with NLT <= 20: rounded objective within 5%
    /// of the exhaustive optimum; exact optimum on a fixed suite.
    CheckResult check_qp_oracle(int instances = 50, std::uint64_t seed = 4);

    /// step_alpha against the information-form posterior mean, relative error <= 1e-8.
    CheckResult check_lmmse_oracle(int instances = 20, std::uint64_t seed = 5);

    /// solve_least_squares against a complete-orthogonal-decomposition solve.
    CheckResult check_least_squares_oracle(int instances = 20, std::uint64_t seed = 11);

    /// Three stackings against a direct sum of the signal model, relative error
    /// <= 1e-12, and exact permutation relations between their observation vectors.
    CheckResult check_stacking(int scenes = 20, std::uint64_t seed = 6);

    /// Uniform configurations are the only minimizers with negative couplings
    /// and no field (N <= max_n), and the quadratic and edge-sum energies agree
    /// on every configuration for N <= 6.
    CheckResult check_ising_clustering(int max_n = 12, std::uint64_t seed = 7);

    /// 2D^2/lambda of `scene` is within 1% of 49 m.
    CheckResult check_fraunhofer(const SceneConfig &scene);

    /// All of the above.
    std::vector<CheckResult> run_selftest(const SceneConfig &scene);
}
