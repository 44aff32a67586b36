// SPDX-License-Identifier: Apache-2.0
//
// Single-path search over (theta, d, d_ue).
//
// A path is scored against per-antenna, per-subcarrier data v(n,k) with
// per-antenna weights A(n) through
//     w(p) = sum_{k,n} conj(h_k(p)[n]) v(n,k),   E(p) = sum_{k,n} A(n) |h_k(p)[n]|^2.
// Two criteria are supported:
//   ProfiledGain  the complex gain is free:        loss = -|w|^2 / E
//   UnitModulus   only a common phase is free:     loss = ||v||^2 + E - 2|w|
// The first is the single-path least-squares fit used inside the estimator,
// the second is the steering-vector MLE with the phase folded into the gain.

#pragma once

#include "elaa/geometry.hpp"
#include "elaa/types.hpp"

#include <memory>

namespace elaa
{
    struct MleGrid
    {
        double theta_min = deg2rad(-60.0);
        double theta_max = deg2rad(60.0);
        double theta_step = deg2rad(1.0);
        double d_min = 1.0;
        double d_max = 60.0;
        int d_points = 200;
        bool d_log = true;
        double due_min = 0.0;
        double due_max = 20.0;
        double due_step = 0.25;
        int polish_sweeps = 3;
        double polish_tol = 1e-6; // golden-section stop, as a fraction of the bracket

        void validate() const;
        std::vector<double> thetas() const;
        std::vector<double> distances() const;
        std::vector<double> dues() const;
    };

    enum class FitCriterion
    {
        ProfiledGain,
        UnitModulus
    };

    struct PathData
    {
        CMatrix v;      // N x K
        RVector weight; // N
        double energy = 0.0; // ||v||^2, only used by UnitModulus

        /// Plain steering-vector data: v = h_hat, A = 1.
        static PathData from_response(const CMatrix &h_hat);
    };

    struct PathPoint
    {
        double theta = 0.0;
        double distance = 1.0;
        double d_ue = 0.0;
        double loss = 0.0;
        Complex w{0.0, 0.0};
        double e = 0.0;

        /// Gain implied by the criterion: w/E for ProfiledGain, w/|w| for UnitModulus.
        Complex gain(FitCriterion criterion) const;
    };

    /// Exact loss at one parameter point.
    PathPoint evaluate_path(const ArrayGeometry &geom, const OfdmConfig &ofdm, const PathData &data,
                            FitCriterion criterion, double theta, double d, double d_ue);

    /// Steering vectors h_k(0, d, theta) for every (theta, d) grid point and
    /// subcarrier, stored in single precision (coarse search only); immutable
    /// and shareable between threads.
    class SteeringDictionary
    {
    public:
        SteeringDictionary(const ArrayGeometry &geom, const OfdmConfig &ofdm, const MleGrid &grid);

        const ArrayGeometry &geometry() const { return geom_; }
        const OfdmConfig &ofdm() const { return ofdm_; }
        const MleGrid &grid() const { return grid_; }
        const std::vector<double> &thetas() const { return thetas_; }
        const std::vector<double> &distances() const { return distances_; }
        Eigen::Index size() const { return amp2_.cols(); }

        double theta_of(Eigen::Index col) const { return thetas_[static_cast<std::size_t>(col % thetas_.size())]; }
        double distance_of(Eigen::Index col) const { return distances_[static_cast<std::size_t>(col / thetas_.size())]; }

        /// For every grid point: q(k) = sum_n conj(h_k[n]) v(n,k) at d_ue = 0
        /// (q is K x G) and E = K sum_n A(n) |h[n]|^2.
        void correlate_all(const PathData &data, CMatrix &q, RVector &e) const;

    private:
        ArrayGeometry geom_;
        OfdmConfig ofdm_;
        MleGrid grid_;
        std::vector<double> thetas_;
        std::vector<double> distances_;
        std::vector<Eigen::MatrixXf> atoms_; // per subcarrier, 2N x G: [Re h_k; Im h_k]
        Eigen::MatrixXf amp2_;               // N x G, (d / d_n)^2
    };

    using DictionaryPtr = std::shared_ptr<const SteeringDictionary>;

    /// Best grid point over (theta, d) and the given d_ue candidates.
    PathPoint coarse_search(const SteeringDictionary &dict, const PathData &data, FitCriterion criterion,
                            const std::vector<double> &due_candidates);

    struct PolishBox
    {
        double theta_half = deg2rad(1.0);
        double d_rel = 0.03;
        double due_half = 0.0; // <= 0 searches the whole [due_min, due_max]
        double due_min = 0.0;
        double due_max = 20.0;
        bool fix_due = false;
        int sweeps = 3;
        double tol = 1e-6;
    };

    /// Coordinate-wise golden-section refinement starting from `start`; the
    /// returned loss never exceeds the loss at `start`.
    PathPoint polish(const ArrayGeometry &geom, const OfdmConfig &ofdm, const PathData &data,
                     FitCriterion criterion, const PathPoint &start, const PolishBox &box);
}
