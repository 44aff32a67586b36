// SPDX-License-Identifier: Apache-2.0
//
// Box-relaxed binary quadratic program for the visibility indicators:
//
//     min_b  2 b^T E b + r^T b   s.t.  0 <= b <= 1,  b_i (1 - b_i) <= eta_i
//
// b is tied across the T snapshot replications (b = 1_T (x) x), so only NL
// variables are free. Solved by projected gradient with a continuation penalty
// mu * sum b_i (1 - b_i) whose weight doubles until the near-binary constraint
// holds, then thresholded at 0.5 and polished by greedy flips of contiguous
// index intervals (single flips included).
// E is indefinite in general; only local optimality is claimed.

#pragma once

#include "elaa/ising.hpp"
#include "elaa/types.hpp"

#include <optional>

namespace elaa
{
    struct QpProblem
    {
        RSparse E; // NLT x NLT, I_T (x) blkdiag structure
        RVector r; // NLT
        RVector eta; // NLT, entries in [0, 0.25]
        int replicas = 1; // T

        Eigen::Index size() const { return r.size(); }
        void validate() const;
    };

    struct QpSettings
    {
        int max_inner = 500;    // projected-gradient iterations per penalty level
        int max_levels = 40;    // penalty doublings
        double penalty0 = 1e-3; // initial penalty, relative to the problem scale
        double step_tol = 1e-10;
        double threshold = 0.5;
        bool flip_polish = true; // interval-flip descent after rounding
    };

    struct QpResult
    {
        RVector relaxed; // NLT
        RVector rounded; // NLT, entries in {0,1}
        double objective = 0.0; // 2 b^T E b + r^T b at the rounded point
        std::vector<double> surrogate; // penalized surrogate after every inner step
        std::vector<int> level_starts; // surrogate index where each penalty level begins
        int iterations = 0;
        bool converged = true; // false when eta could not be met within the budget
    };

    /// 2 b^T E b + r^T b.
    double qp_objective(const QpProblem &qp, const RVector &b);

    /// Assembles E, r = r1 + r2 + r3 with r2 = -2 E^T 1 and r3 = 2 gamma, and eta.
    QpProblem make_qp(const IsingParams &ising, const RVector &r1, double eta);

    /// r1_i = |alpha_i - 1|^2 / sigma_v2 - |alpha_i|^2 / sigma_b2.
    RVector evidence_from_alpha(const CVector &alpha, double sigma_b2, double sigma_v2);

    QpResult step_b(const QpProblem &qp, const QpSettings &settings = {},
                    const std::optional<RVector> &warm_start = std::nullopt);
}
