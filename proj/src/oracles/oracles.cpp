// SPDX-License-Identifier: Apache-2.0

#include "elaa/oracles.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace elaa::oracle
{
    double antenna_distance(const ArrayGeometry &geom, double d, double theta, int n)
    {
        const double sx = d * std::cos(theta);
        const double sy = d * std::sin(theta);
        const double ay = (2.0 * n - geom.n_antennas - 1.0) / 2.0 * geom.spacing;
        return std::hypot(sx, sy - ay);
    }

    Complex steering_entry(const ArrayGeometry &geom, const OfdmConfig &ofdm, const PathParams &path, int n, int k)
    {
        const double fk = ofdm.carrier + k * ofdm.subcarrier_spacing;
        const double dn = oracle::antenna_distance(geom, path.distance, path.aoa, n);
        const double phase = -2.0 * kPi * fk * (path.d_ue + dn) / ofdm.speed_of_light;
        return path.distance / dn * Complex(std::cos(phase), std::sin(phase));
    }

    CVector model(const std::vector<CMatrix> &steering, const std::vector<PathParams> &paths, const CVector &alpha,
                  int n_snapshots)
    {
        const auto N = static_cast<int>(steering.front().rows());
        const auto K = static_cast<int>(steering.front().cols());
        const int T = n_snapshots;
        const auto L = static_cast<int>(paths.size());
        CVector y = CVector::Zero(Eigen::Index(N) * K * T);
        for (int t = 0; t < T; ++t)
            for (int k = 0; k < K; ++k)
                for (int n = 0; n < N; ++n)
                {
                    Complex acc = 0.0;
                    for (int l = 0; l < L; ++l)
                        acc += paths[l].gain * alpha(n + N * (l + L * t)) * steering[l](n, k);
                    y(n + N * (k + K * t)) = acc;
                }
        return y;
    }

    CVector posterior_mean(const CMatrix &R, const CVector &y, const CVector &mu, const RVector &s, double noise)
    {
        const Eigen::Index m = R.cols();
        CMatrix info = R.adjoint() * R / noise;
        CVector rhs = R.adjoint() * y / noise;
        for (Eigen::Index i = 0; i < m; ++i)
        {
            info(i, i) += 1.0 / s(i);
            rhs(i) += mu(i) / s(i);
        }
        return info.fullPivLu().solve(rhs);
    }

    CVector least_squares(const CMatrix &R, const CVector &y)
    {
        return R.completeOrthogonalDecomposition().solve(y);
    }

    namespace
    {
        double dense_objective(const RMatrix &E, const RVector &r, const RVector &b)
        {
            double quad = 0.0;
            for (Eigen::Index i = 0; i < E.rows(); ++i)
                for (Eigen::Index j = 0; j < E.cols(); ++j)
                    quad += b(i) * E(i, j) * b(j);
            double lin = 0.0;
            for (Eigen::Index i = 0; i < b.size(); ++i)
                lin += r(i) * b(i);
            return 2.0 * quad + lin;
        }
    }

    double qp_objective(const QpProblem &qp, const RVector &b)
    {
        return dense_objective(RMatrix(qp.E), qp.r, b);
    }

    BinaryOptimum qp_minimum(const QpProblem &qp)
    {
        const Eigen::Index n = qp.size();
        const Eigen::Index free = n / qp.replicas;
        if (free > 24)
            throw InvalidParameter("oracle::qp_minimum: too many free variables");
        const RMatrix E(qp.E);
        BinaryOptimum best;
        best.value = std::numeric_limits<double>::infinity();
        RVector b(n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << free); ++mask)
        {
            for (Eigen::Index i = 0; i < n; ++i)
                b(i) = (mask >> (i % free)) & 1U ? 1.0 : 0.0;
            const double v = dense_objective(E, qp.r, b);
            if (v < best.value)
            {
                best.value = v;
                best.b = b;
            }
        }
        return best;
    }

    double ising_energy(const IsingParams &params, const RVector &b)
    {
        const int N = params.n_antennas;
        const int L = params.n_paths;
        double e = 0.0;
        for (int t = 0; t < params.n_snapshots; ++t)
            for (int l = 0; l < L; ++l)
            {
                auto spin = [&](int n) { return 2.0 * b(n + N * (l + L * t)) - 1.0; };
                for (const IsingEdge &edge : params.edges[l])
                    e += edge.beta * spin(edge.n) * spin(edge.m);
                for (int n = 0; n < N; ++n)
                    e += params.gamma(n, l) * spin(n);
            }
        return e;
    }

    std::vector<RVector> ising_minimizers(const IsingParams &params, double tol)
    {
        const int N = params.n_antennas;
        if (N > 20 || params.n_paths != 1 || params.n_snapshots != 1)
            throw InvalidParameter("oracle::ising_minimizers: need one path, one snapshot and N <= 20");
        std::vector<double> energy(std::size_t(1) << N);
        RVector b(N);
        double lowest = std::numeric_limits<double>::infinity();
        for (std::uint64_t mask = 0; mask < energy.size(); ++mask)
        {
            for (int n = 0; n < N; ++n)
                b(n) = (mask >> n) & 1U ? 1.0 : 0.0;
            energy[mask] = oracle::ising_energy(params, b);
            lowest = std::min(lowest, energy[mask]);
        }
        std::vector<RVector> out;
        for (std::uint64_t mask = 0; mask < energy.size(); ++mask)
            if (energy[mask] <= lowest + tol * std::max(1.0, std::abs(lowest)))
            {
                for (int n = 0; n < N; ++n)
                    b(n) = (mask >> n) & 1U ? 1.0 : 0.0;
                out.push_back(b);
            }
        return out;
    }
}
