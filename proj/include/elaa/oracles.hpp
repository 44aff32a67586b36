// SPDX-License-Identifier: Apache-2.0
//
// Slow reference implementations used to cross-check the estimator. Each one
// takes a different computational route from the production code: Cartesian
// geometry instead of the law of cosines, explicit sums instead of stacked
// regressors, dense information-form posteriors, SVD-type solves and
// exhaustive enumeration.

#pragma once

#include "elaa/geometry.hpp"
#include "elaa/ising.hpp"
#include "elaa/qp.hpp"

namespace elaa::oracle
{
    /// Euclidean distance between (d cos theta, d sin theta) and antenna n at
    /// (0, delta_n * spacing); n is 1-based.
    double antenna_distance(const ArrayGeometry &geom, double d, double theta, int n);

    /// Steering entry n (1-based) at subcarrier k (1-based), evaluated as a
    /// scalar from the Cartesian distance.
    Complex steering_entry(const ArrayGeometry &geom, const OfdmConfig &ofdm, const PathParams &path, int n, int k);

    /// y(n,k,t) = sum_l g_l alpha(n,l,t) h_k^(l)[n] as an explicit sum, in
    /// alpha-form order n + N*(k + K*t). steering[l] is N x K; alpha has length
    /// NLT in order n + N*(l + L*t); gains are taken from `paths`.
    CVector model(const std::vector<CMatrix> &steering, const std::vector<PathParams> &paths, const CVector &alpha,
                  int n_snapshots);

    /// Posterior mean of x ~ CN(mu, diag(s)) given y = R x + CN(0, noise I),
    /// from the information form (S^-1 + R^H R / noise)^-1 (S^-1 mu + R^H y / noise).
    CVector posterior_mean(const CMatrix &R, const CVector &y, const CVector &mu, const RVector &s, double noise);

    /// Minimum-norm least-squares solution via a complete orthogonal decomposition.
    CVector least_squares(const CMatrix &R, const CVector &y);

    /// 2 b^T E b + r^T b with E expanded to a dense matrix.
    double qp_objective(const QpProblem &qp, const RVector &b);

    struct BinaryOptimum
    {
        RVector b;
        double value = 0.0;
    };

    /// Exhaustive minimum of the QP over binary b tied across replicas.
    /// Refuses more than 24 free variables.
    BinaryOptimum qp_minimum(const QpProblem &qp);

    /// Ising energy as a sum over edges and sites with spins s = 2b - 1, each
    /// unordered edge counted once, every snapshot replica included.
    double ising_energy(const IsingParams &params, const RVector &b);

    /// All minimizers of the single-path, single-snapshot Ising energy,
    /// by enumeration of the 2^N configurations (N <= 20).
    std::vector<RVector> ising_minimizers(const IsingParams &params, double tol = 1e-12);
}
