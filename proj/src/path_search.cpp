// SPDX-License-Identifier: Apache-2.0

#include "elaa/path_search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>

namespace elaa
{
    namespace
    {
        constexpr double kMaxAngle = 89.9 * kPi / 180.0;
        constexpr double kMinDistance = 1e-3;

        double loss_of(FitCriterion criterion, const PathData &data, Complex w, double e)
        {
            if (criterion == FitCriterion::ProfiledGain)
                return e > 0.0 ? -std::norm(w) / e : 0.0;
            return data.energy + e - 2.0 * std::abs(w);
        }

        void check_data(const PathData &data, int n_antennas, int n_subcarriers)
        {
            if (data.v.rows() != n_antennas || data.v.cols() != n_subcarriers || data.weight.size() != n_antennas)
                throw InvalidParameter("path search: data must be N x K with N weights");
        }

        // Golden-section minimisation of f on [a, b]; returns the best abscissa seen.
        double golden(const std::function<double(double)> &f, double a, double b, double tol, double &best_value)
        {
            const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
            const double stop = tol * (b - a);
            double x1 = b - ratio * (b - a);
            double x2 = a + ratio * (b - a);
            double f1 = f(x1);
            double f2 = f(x2);
            double best_x = f1 <= f2 ? x1 : x2;
            best_value = std::min(f1, f2);
            while (b - a > stop)
            {
                if (f1 <= f2)
                {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - ratio * (b - a);
                    f1 = f(x1);
                    if (f1 < best_value)
                    {
                        best_value = f1;
                        best_x = x1;
                    }
                }
                else
                {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + ratio * (b - a);
                    f2 = f(x2);
                    if (f2 < best_value)
                    {
                        best_value = f2;
                        best_x = x2;
                    }
                }
            }
            return best_x;
        }
    }

    void MleGrid::validate() const
    {
        if (!(theta_step > 0.0) || !(theta_max >= theta_min) || theta_min <= -kPi / 2.0 || theta_max >= kPi / 2.0)
            throw InvalidParameter("MleGrid: angle range must lie inside (-90, 90) degrees with a positive step");
        if (!(d_min > 0.0) || !(d_max >= d_min) || d_points < 1)
            throw InvalidParameter("MleGrid: distance range must be positive and non-empty");
        if (!(due_min >= 0.0) || !(due_max >= due_min) || !(due_step > 0.0))
            throw InvalidParameter("MleGrid: d_ue range must be non-negative with a positive step");
        if (polish_sweeps < 0 || !(polish_tol > 0.0) || polish_tol >= 1.0)
            throw InvalidParameter("MleGrid: polish settings out of range");
    }

    std::vector<double> MleGrid::thetas() const
    {
        std::vector<double> out;
        const auto count = static_cast<int>(std::floor((theta_max - theta_min) / theta_step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i)
            out.push_back(theta_min + i * theta_step);
        return out;
    }

    std::vector<double> MleGrid::distances() const
    {
        std::vector<double> out;
        if (d_points == 1)
            return {d_min};
        for (int i = 0; i < d_points; ++i)
        {
            const double u = static_cast<double>(i) / (d_points - 1);
            out.push_back(d_log ? d_min * std::pow(d_max / d_min, u) : d_min + u * (d_max - d_min));
        }
        return out;
    }

    std::vector<double> MleGrid::dues() const
    {
        std::vector<double> out;
        const auto count = static_cast<int>(std::floor((due_max - due_min) / due_step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i)
            out.push_back(due_min + i * due_step);
        return out;
    }

    PathData PathData::from_response(const CMatrix &h_hat)
    {
        PathData data;
        data.v = h_hat;
        data.weight = RVector::Ones(h_hat.rows());
        data.energy = h_hat.squaredNorm();
        return data;
    }

    Complex PathPoint::gain(FitCriterion criterion) const
    {
        if (criterion == FitCriterion::ProfiledGain)
            return e > 0.0 ? w / e : Complex(0.0, 0.0);
        const double m = std::abs(w);
        return m > 0.0 ? w / m : Complex(1.0, 0.0);
    }

    PathPoint evaluate_path(const ArrayGeometry &geom, const OfdmConfig &ofdm, const PathData &data,
                            FitCriterion criterion, double theta, double d, double d_ue)
    {
        const int N = geom.n_antennas;
        const int K = ofdm.n_subcarriers;
        check_data(data, N, K);
        const double c = ofdm.speed_of_light;

        Complex w(0.0, 0.0);
        double e = 0.0;
        for (int n = 1; n <= N; ++n)
        {
            const double dn = antenna_distance(geom, d, theta, n);
            const double amp = d / dn;
            e += data.weight(n - 1) * amp * amp;
            // conj(h_k[n]) = amp * exp(+j 2 pi f_k (d_ue + d_n) / c), advanced in k by a fixed phasor
            Complex ch = std::polar(amp, kTwoPi * ofdm.frequency(1) * (d_ue + dn) / c);
            const Complex step = std::polar(1.0, kTwoPi * ofdm.subcarrier_spacing * (d_ue + dn) / c);
            for (int k = 1; k <= K; ++k)
            {
                w += ch * data.v(n - 1, k - 1);
                ch *= step;
            }
        }
        e *= K;

        PathPoint p;
        p.theta = theta;
        p.distance = d;
        p.d_ue = d_ue;
        p.w = w;
        p.e = e;
        p.loss = loss_of(criterion, data, w, e);
        return p;
    }

    SteeringDictionary::SteeringDictionary(const ArrayGeometry &geom, const OfdmConfig &ofdm, const MleGrid &grid)
        : geom_(geom), ofdm_(ofdm), grid_(grid)
    {
        geom.validate();
        ofdm.validate();
        grid.validate();
        thetas_ = grid.thetas();
        distances_ = grid.distances();

        const int N = geom.n_antennas;
        const int K = ofdm.n_subcarriers;
        const auto G = static_cast<Eigen::Index>(thetas_.size() * distances_.size());
        atoms_.assign(static_cast<std::size_t>(K), Eigen::MatrixXf(2 * N, G));
        amp2_.resize(N, G);
        const double c = ofdm.speed_of_light;
        for (Eigen::Index col = 0; col < G; ++col)
        {
            const double theta = theta_of(col);
            const double d = distance_of(col);
            for (int n = 1; n <= N; ++n)
            {
                const double dn = antenna_distance(geom, d, theta, n);
                amp2_(n - 1, col) = static_cast<float>((d / dn) * (d / dn));
                for (int k = 1; k <= K; ++k)
                {
                    const Complex h = std::polar(d / dn, -kTwoPi * ofdm.frequency(k) * dn / c);
                    atoms_[static_cast<std::size_t>(k - 1)](n - 1, col) = static_cast<float>(h.real());
                    atoms_[static_cast<std::size_t>(k - 1)](N + n - 1, col) = static_cast<float>(h.imag());
                }
            }
        }
    }

    void SteeringDictionary::correlate_all(const PathData &data, CMatrix &q, RVector &e) const
    {
        const Eigen::Index N = amp2_.rows();
        const Eigen::Index G = amp2_.cols();
        const int K = ofdm_.n_subcarriers;
        check_data(data, static_cast<int>(N), K);

        q.resize(K, G);
        Eigen::MatrixXf V(2 * N, 2);
        for (int k = 0; k < K; ++k)
        {
            // conj(h) v = (hr vr + hi vi) + j (hr vi - hi vr)
            V.col(0) << data.v.col(k).real().cast<float>(), data.v.col(k).imag().cast<float>();
            V.col(1) << data.v.col(k).imag().cast<float>(), -data.v.col(k).real().cast<float>();
            const Eigen::MatrixXf Q = atoms_[static_cast<std::size_t>(k)].transpose() * V;
            q.row(k).real() = Q.col(0).cast<double>().transpose();
            q.row(k).imag() = Q.col(1).cast<double>().transpose();
        }
        e = (amp2_.transpose() * data.weight.cast<float>()).cast<double>() * K;
    }

    PathPoint coarse_search(const SteeringDictionary &dict, const PathData &data, FitCriterion criterion,
                            const std::vector<double> &due_candidates)
    {
        const OfdmConfig &ofdm = dict.ofdm();
        const int K = ofdm.n_subcarriers;
        check_data(data, dict.geometry().n_antennas, K);
        if (due_candidates.empty())
            throw InvalidParameter("coarse_search: need at least one d_ue candidate");

        // rot(k, j) = exp(+j 2 pi f_k due_j / c)
        const auto J = static_cast<Eigen::Index>(due_candidates.size());
        RMatrix rot_re(K, J), rot_im(K, J);
        for (Eigen::Index j = 0; j < J; ++j)
            for (int k = 0; k < K; ++k)
            {
                const Complex r = std::polar(1.0, kTwoPi * ofdm.frequency(k + 1) *
                                                      due_candidates[static_cast<std::size_t>(j)] / ofdm.speed_of_light);
                rot_re(k, j) = r.real();
                rot_im(k, j) = r.imag();
            }

        CMatrix q;
        RVector e;
        dict.correlate_all(data, q, e);
        const RMatrix q_re = q.real();
        const RMatrix q_im = q.imag();

        // Both losses decrease with |w| at fixed E, so only the largest |w|^2 per
        // grid point needs a full loss evaluation.
        PathPoint best;
        best.loss = std::numeric_limits<double>::infinity();
        Eigen::Index best_col = 0;
        Eigen::Index best_j = 0;
        for (Eigen::Index col = 0; col < dict.size(); ++col)
        {
            double top = -1.0;
            Eigen::Index top_j = 0;
            double top_re = 0.0;
            double top_im = 0.0;
            for (Eigen::Index j = 0; j < J; ++j)
            {
                double wr = 0.0;
                double wi = 0.0;
                for (int k = 0; k < K; ++k)
                {
                    wr += rot_re(k, j) * q_re(k, col) - rot_im(k, j) * q_im(k, col);
                    wi += rot_re(k, j) * q_im(k, col) + rot_im(k, j) * q_re(k, col);
                }
                const double m = wr * wr + wi * wi;
                if (m > top)
                {
                    top = m;
                    top_j = j;
                    top_re = wr;
                    top_im = wi;
                }
            }
            const Complex w(top_re, top_im);
            const double loss = loss_of(criterion, data, w, e(col));
            if (loss < best.loss)
            {
                best.loss = loss;
                best_col = col;
                best_j = top_j;
                best.w = w;
                best.e = e(col);
            }
        }
        best.theta = dict.theta_of(best_col);
        best.distance = dict.distance_of(best_col);
        best.d_ue = due_candidates[static_cast<std::size_t>(best_j)];
        return best;
    }

    PathPoint polish(const ArrayGeometry &geom, const OfdmConfig &ofdm, const PathData &data,
                     FitCriterion criterion, const PathPoint &start, const PolishBox &box)
    {
        PathPoint best = evaluate_path(geom, ofdm, data, criterion, start.theta, start.distance, start.d_ue);
        auto at = [&](double theta, double d, double due)
        { return evaluate_path(geom, ofdm, data, criterion, theta, d, due).loss; };

        for (int sweep = 0; sweep < box.sweeps; ++sweep)
        {
            const PathPoint before = best;
            double value = 0.0;

            const double t_lo = std::max(best.theta - box.theta_half, -kMaxAngle);
            const double t_hi = std::min(best.theta + box.theta_half, kMaxAngle);
            const double t = golden([&](double x) { return at(x, best.distance, best.d_ue); }, t_lo, t_hi, box.tol, value);
            if (value < best.loss)
                best = evaluate_path(geom, ofdm, data, criterion, t, best.distance, best.d_ue);

            const double d_lo = std::max(best.distance * (1.0 - box.d_rel), kMinDistance);
            const double d_hi = best.distance * (1.0 + box.d_rel);
            const double d = golden([&](double x) { return at(best.theta, x, best.d_ue); }, d_lo, d_hi, box.tol, value);
            if (value < best.loss)
                best = evaluate_path(geom, ofdm, data, criterion, best.theta, d, best.d_ue);

            if (!box.fix_due)
            {
                double u_lo = box.due_min;
                double u_hi = box.due_max;
                if (box.due_half > 0.0)
                {
                    u_lo = std::max(best.d_ue - box.due_half, box.due_min);
                    u_hi = std::min(best.d_ue + box.due_half, box.due_max);
                }
                if (u_hi > u_lo)
                {
                    const double u = golden([&](double x) { return at(best.theta, best.distance, x); }, u_lo, u_hi, box.tol, value);
                    if (value < best.loss)
                        best = evaluate_path(geom, ofdm, data, criterion, best.theta, best.distance, u);
                }
            }
            if (before.loss - best.loss <= 1e-15 * std::abs(best.loss))
                break;

            // Pattern move along this sweep's displacement; the coordinates
            // are strongly coupled and single-axis steps crawl along the valley.
            const double dt = best.theta - before.theta, dd = best.distance - before.distance,
                         du = best.d_ue - before.d_ue;
            auto along = [&](double s)
            {
                const double theta = std::clamp(before.theta + s * dt, -kMaxAngle, kMaxAngle);
                const double dist = std::max(before.distance + s * dd, kMinDistance);
                const double due = box.fix_due ? before.d_ue : std::clamp(before.d_ue + s * du, box.due_min, box.due_max);
                return std::tuple{theta, dist, due};
            };
            const double s = golden(
                [&](double x)
                {
                    const auto [theta, dist, due] = along(x);
                    return at(theta, dist, due);
                },
                1.0, 8.0, box.tol, value);
            if (value < best.loss)
            {
                const auto [theta, dist, due] = along(s);
                best = evaluate_path(geom, ofdm, data, criterion, theta, dist, due);
            }
        }
        return best;
    }
}
