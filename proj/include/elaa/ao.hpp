// SPDX-License-Identifier: Apache-2.0
//
// Alternating minimisation of f1 + f2 + f3 over (g, h, alpha, b):
//
//   f1 = ||y - sum_l g_l alpha^(l) . h^(l)||^2 / sigma_n^2
//   f2 = sum_i |alpha_i - b_i|^2 / (sigma_b2 (1 - b_i) + sigma_v2 b_i)
//   f3 = Ising energy of b
//
// Each cycle runs a g-step (least squares), an h-step, an alpha-step (LMMSE
// posterior mean) and a b-step (relaxed binary QP), then tests the relative
// change of the total objective.
//
// The h-step defaults to a per-path parametric refinement: the steering
// vectors are kept on the spherical-wavefront manifold and (theta, d, d_ue)
// of one path at a time are polished against the partial residual with that
// path's gain profiled out. An unconstrained least-squares update of h is
// available as HUpdate::LeastSquares; with alpha close to one in every
// snapshot its normal matrix is nearly rank one per antenna and subcarrier.
//
// The b-step evidence defaults to the profiled form: for every entry, the
// difference between min over alpha_i of f1 + f2 with b_i = 1 and with b_i = 0,
// all other coordinates fixed. BEvidence::Alpha uses the plug-in form
// |alpha - 1|^2 / sigma_v2 - |alpha|^2 / sigma_b2 instead. A proposed indicator
// is kept only if, after re-solving alpha, the total objective decreases.

#pragma once

#include "elaa/ising.hpp"
#include "elaa/path_search.hpp"
#include "elaa/qp.hpp"
#include "elaa/stacking.hpp"
#include "elaa/synth.hpp"

#include <iosfwd>
#include <string>

namespace elaa
{
    enum class BEvidence
    {
        Profiled,
        Alpha
    };

    enum class HUpdate
    {
        Parametric,
        LeastSquares
    };

    struct Variances
    {
        double noise = 1.0;    // sigma_n^2
        double sigma_b2 = 1e-2;
        double sigma_v2 = 1e-4;

        void validate() const;
    };

    /// Everything the estimator may know about a scene besides the data.
    struct KnownConstants
    {
        ArrayGeometry geom;
        OfdmConfig ofdm;
        int n_paths = 1;
        Variances var;

        Dims dims() const { return {geom.n_antennas, ofdm.n_subcarriers, ofdm.n_snapshots, n_paths}; }
        static KnownConstants from_scene(const SceneConfig &scene);
    };

    struct AOConfig
    {
        int max_iterations = 50;
        double tolerance = 1e-4;
        double ridge = 1e-8;
        double eta = 0.05;
        QpSettings qp;
        BEvidence b_evidence = BEvidence::Profiled;
        HUpdate h_update = HUpdate::Parametric;
        bool guard_b = true;
        bool warm_start_b = false;
        PolishBox refine{deg2rad(1.0), 0.03, 0.0, 0.0, 20.0, false, 2, 1e-6};

        void validate() const;
    };

    struct ObjectiveTerms
    {
        double f1 = 0.0;
        double f2 = 0.0;
        double f3 = 0.0;

        double total() const { return f1 + f2 + f3; }
    };

    struct SubstepRecord
    {
        int iteration = 0;
        std::string step; // "g", "h", "alpha" or "b"
        double before = 0.0;
        double after = 0.0;
        bool rejected = false;        // b-step: part of the proposal discarded by the guard
        bool rounding_raised = false; // b-step: the rounded QP output, at fixed g, h, alpha, raised the objective
    };

    struct AOState
    {
        Dims dims;
        CVector g;          // L
        CVector h;          // NLK
        CVector alpha;      // NLT
        RVector b;          // NLT, binary, tied across snapshots
        RVector b_relaxed;  // NLT, last relaxed QP solution
        std::vector<PathParams> paths; // parametric form of h when available

        std::vector<ObjectiveTerms> history; // initial point plus one entry per iteration
        std::vector<SubstepRecord> substeps;
        int iterations = 0;
        bool converged = false;
        int b_rejections = 0;
        int qp_warnings = 0;
        int ridge_engagements = 0;
    };

    struct LsSolution
    {
        CVector x;
        bool ridge_engaged = false;
    };

    /// Least squares through the normal equations R^H R x = R^H y. A ridge
    /// lambda * tr(R^H R) / cols is added when the LDL^T pivots indicate
    /// ill-conditioning; with lambda = 0 a singular system throws SingularSystem.
    LsSolution solve_least_squares(const CSparse &R, const CVector &y, double ridge);

    inline LsSolution step_g(const CVector &y_bar, const CSparse &R_bar, double ridge)
    {
        return solve_least_squares(R_bar, y_bar, ridge);
    }

    inline LsSolution step_h(const CVector &y_tilde, const CSparse &R_tilde, double ridge)
    {
        return solve_least_squares(R_tilde, y_tilde, ridge);
    }

    /// alpha = mu + S R^H (R S R^H + sigma_n^2 I)^{-1} (y - R mu) with mu = b and
    /// S = diag(sigma_b2 (1 - b) + sigma_v2 b).
    CVector step_alpha(const CVector &y_breve, const CSparse &R_breve, const RVector &b, const Variances &var);

    ObjectiveTerms objective(const ObservationTensor &y, const CVector &g, const CVector &h, const CVector &alpha,
                             const RVector &b, const Variances &var, const IsingParams &ising);

    inline ObjectiveTerms objective(const ObservationTensor &y, const AOState &s, const Variances &var,
                                    const IsingParams &ising)
    {
        return objective(y, s.g, s.h, s.alpha, s.b, var, ising);
    }

    /// Profiled b-evidence r1 (length NLT); see the header comment.
    RVector profiled_evidence(const ObservationTensor &y, const CVector &g, const CVector &h, const CVector &alpha,
                              const Variances &var);

    /// Single-path refinement of path l against the partial residual, gain
    /// profiled out. Updates g(l), paths[l] and the matching block of h only if
    /// the data misfit decreases; returns whether it did.
    bool refine_path(const ObservationTensor &y, const KnownConstants &known, int l, const CVector &alpha,
                     const PolishBox &box, CVector &g, CVector &h, std::vector<PathParams> &paths);

    /// b = 1, alpha = 1; successive matched-filter grid search with d_ue = 0
    /// and joint least-squares gains for cancellation; g from step_g.
    AOState default_init(const ObservationTensor &y, const KnownConstants &known, const SteeringDictionary &dict,
                         double ridge = 1e-8);

    /// State holding ground-truth values, for fixed-point checks and diagnostics.
    AOState state_from_truth(const ObservationSet &obs);

    AOState run_ao(const ObservationTensor &y, const KnownConstants &known, const IsingParams &ising,
                   const AOConfig &config, AOState init);

    /// iteration,f1,f2,f3,total
    void write_trace_csv(std::ostream &out, const AOState &state);
}
