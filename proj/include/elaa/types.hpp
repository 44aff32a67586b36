// SPDX-License-Identifier: Apache-2.0
//
// Common numeric types and error classes.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace elaa
{
    using Complex = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RVector = Eigen::VectorXd;
    using RMatrix = Eigen::MatrixXd;
    using CSparse = Eigen::SparseMatrix<Complex>;
    using RSparse = Eigen::SparseMatrix<double>;

    inline constexpr double kPi = 3.14159265358979323846;
    inline constexpr double kTwoPi = 2.0 * kPi;

    inline double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

    /// Raised for out-of-domain arguments and inconsistent dimensions.
    class InvalidParameter : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Raised when a normal-equation system is singular and no ridge is allowed.
    class SingularSystem : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Problem sizes shared by every stacking: antennas N, subcarriers K,
    /// snapshots T and paths L.
    struct Dims
    {
        int n_antennas = 0;
        int n_subcarriers = 0;
        int n_snapshots = 0;
        int n_paths = 0;

        int N() const { return n_antennas; }
        int K() const { return n_subcarriers; }
        int T() const { return n_snapshots; }
        int L() const { return n_paths; }

        /// Length of every stacked observation vector.
        Eigen::Index nkt() const { return Eigen::Index(n_antennas) * n_subcarriers * n_snapshots; }
        Eigen::Index nlt() const { return Eigen::Index(n_antennas) * n_paths * n_snapshots; }
        Eigen::Index nlk() const { return Eigen::Index(n_antennas) * n_paths * n_subcarriers; }
        Eigen::Index nl() const { return Eigen::Index(n_antennas) * n_paths; }

        void validate() const
        {
            if (n_antennas < 2 || n_subcarriers < 1 || n_snapshots < 1 || n_paths < 1)
                throw InvalidParameter("Dims: need N >= 2, K >= 1, T >= 1, L >= 1");
        }

        bool operator==(const Dims &) const = default;
    };

    // Storage conventions (0-based). The observation tensor is stored in the
    // alpha-form order, amplitudes in snapshot-major order and steering
    // vectors in subcarrier-major order:
    //   y(n,k,t)     -> n + N*(k + K*t)
    //   alpha(n,l,t) -> n + N*(l + L*t)
    //   h(n,l,k)     -> n + N*(l + L*k)
    inline Eigen::Index obs_index(const Dims &d, int n, int k, int t)
    {
        return n + Eigen::Index(d.n_antennas) * (k + Eigen::Index(d.n_subcarriers) * t);
    }
    inline Eigen::Index alpha_index(const Dims &d, int n, int l, int t)
    {
        return n + Eigen::Index(d.n_antennas) * (l + Eigen::Index(d.n_paths) * t);
    }
    inline Eigen::Index h_index(const Dims &d, int n, int l, int k)
    {
        return n + Eigen::Index(d.n_antennas) * (l + Eigen::Index(d.n_paths) * k);
    }
}
