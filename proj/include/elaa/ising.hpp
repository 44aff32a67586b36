// SPDX-License-Identifier: Apache-2.0
//
// Ising prior over the visibility indicators.
//
// With spins s = 2b - 1 the per-path energy is
//     sum_{(n,m) in edges} beta_nm s_n s_m + sum_n gamma_n s_n,
// each unordered edge counted once. The stacked form over all paths and
// snapshots is 0.5 s^T E s + gamma^T s with E = I_T (x) blkdiag(E~(0..L-1)).
// Negative beta favours equal neighbours; negative gamma favours visibility.

#pragma once

#include "elaa/types.hpp"

namespace elaa
{
    struct IsingEdge
    {
        int n = 0; // 0-based antenna indices, n != m
        int m = 0;
        double beta = 0.0;
    };

    struct IsingParams
    {
        int n_antennas = 0;
        int n_paths = 0;
        int n_snapshots = 1;
        std::vector<std::vector<IsingEdge>> edges; // per path, unordered
        RMatrix gamma;                             // N x L

        /// Per path, per antenna: (neighbour, beta). Filled by index_neighbors().
        std::vector<std::vector<std::vector<std::pair<int, double>>>> adjacency;

        void validate() const;

        /// Builds the adjacency lists used by energy_gap.
        void index_neighbors();

        /// E~(l), symmetric N x N with zero diagonal.
        RMatrix path_interaction(int l) const;

        /// E = I_T (x) blkdiag(E~(0), ..., E~(L-1)), NLT x NLT.
        RSparse assemble_interaction() const;

        /// gamma = 1_T (x) [gamma~(0); ...; gamma~(L-1)], length NLT.
        RVector assemble_bias() const;

        Eigen::Index size() const { return Eigen::Index(n_antennas) * n_paths * n_snapshots; }
    };

    /// Nearest-neighbour chain with beta = -beta0 on every edge and uniform gamma0.
    IsingParams default_chain_params(int n_antennas, int n_paths, int n_snapshots, double beta0, double gamma0);

    /// 0.5 s^T E s + gamma^T s with s = 2b - 1; b may be relaxed to [0,1].
    double ising_energy(const IsingParams &params, const RVector &b);

    /// The same energy evaluated as an explicit sum over edges and sites.
    double ising_energy_edge_sum(const IsingParams &params, const RVector &b);

    /// Energy change when entry `index` of the expanded binary vector b flips.
    /// Runs in O(degree).
    double energy_gap(const IsingParams &params, const RVector &b, Eigen::Index index);
}
