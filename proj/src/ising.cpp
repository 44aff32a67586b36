// SPDX-License-Identifier: Apache-2.0

#include "elaa/ising.hpp"

namespace elaa
{
    void IsingParams::validate() const
    {
        if (n_antennas < 1 || n_paths < 1 || n_snapshots < 1)
            throw InvalidParameter("IsingParams: invalid dimensions");
        if (static_cast<int>(edges.size()) != n_paths)
            throw InvalidParameter("IsingParams: need one edge list per path");
        if (gamma.rows() != n_antennas || gamma.cols() != n_paths)
            throw InvalidParameter("IsingParams: gamma must be N x L");
        for (const auto &list : edges)
            for (const auto &e : list)
                if (e.n == e.m || e.n < 0 || e.m < 0 || e.n >= n_antennas || e.m >= n_antennas)
                    throw InvalidParameter("IsingParams: invalid edge");
    }

    void IsingParams::index_neighbors()
    {
        validate();
        adjacency.assign(static_cast<std::size_t>(n_paths),
                         std::vector<std::vector<std::pair<int, double>>>(static_cast<std::size_t>(n_antennas)));
        for (int l = 0; l < n_paths; ++l)
            for (const auto &e : edges[l])
            {
                adjacency[l][e.n].emplace_back(e.m, e.beta);
                adjacency[l][e.m].emplace_back(e.n, e.beta);
            }
    }

    RMatrix IsingParams::path_interaction(int l) const
    {
        RMatrix E = RMatrix::Zero(n_antennas, n_antennas);
        for (const auto &e : edges.at(static_cast<std::size_t>(l)))
        {
            E(e.n, e.m) += e.beta;
            E(e.m, e.n) += e.beta;
        }
        return E;
    }

    RSparse IsingParams::assemble_interaction() const
    {
        validate();
        std::vector<Eigen::Triplet<double>> entries;
        const Eigen::Index nl = Eigen::Index(n_antennas) * n_paths;
        for (int t = 0; t < n_snapshots; ++t)
            for (int l = 0; l < n_paths; ++l)
            {
                const Eigen::Index offset = nl * t + Eigen::Index(n_antennas) * l;
                for (const auto &e : edges[l])
                {
                    entries.emplace_back(offset + e.n, offset + e.m, e.beta);
                    entries.emplace_back(offset + e.m, offset + e.n, e.beta);
                }
            }
        RSparse E(size(), size());
        E.setFromTriplets(entries.begin(), entries.end());
        return E;
    }

    RVector IsingParams::assemble_bias() const
    {
        const Eigen::Index nl = Eigen::Index(n_antennas) * n_paths;
        const Eigen::Map<const RVector> flat(gamma.data(), nl);
        RVector out(size());
        for (int t = 0; t < n_snapshots; ++t)
            out.segment(nl * t, nl) = flat;
        return out;
    }

    IsingParams default_chain_params(int n_antennas, int n_paths, int n_snapshots, double beta0, double gamma0)
    {
        if (!(beta0 > 0.0))
            throw InvalidParameter("default_chain_params: beta0 must be positive");
        IsingParams p;
        p.n_antennas = n_antennas;
        p.n_paths = n_paths;
        p.n_snapshots = n_snapshots;
        p.edges.resize(static_cast<std::size_t>(n_paths));
        for (auto &list : p.edges)
            for (int n = 0; n + 1 < n_antennas; ++n)
                list.push_back({n, n + 1, -beta0});
        p.gamma = RMatrix::Constant(n_antennas, n_paths, gamma0);
        p.index_neighbors();
        return p;
    }

    double ising_energy(const IsingParams &params, const RVector &b)
    {
        if (b.size() != params.size())
            throw InvalidParameter("ising_energy: indicator length does not match NLT");
        const RVector s = 2.0 * b.array() - 1.0;
        const RSparse E = params.assemble_interaction();
        return 0.5 * s.dot(E * s) + params.assemble_bias().dot(s);
    }

    double ising_energy_edge_sum(const IsingParams &params, const RVector &b)
    {
        if (b.size() != params.size())
            throw InvalidParameter("ising_energy_edge_sum: indicator length does not match NLT");
        params.validate();
        const Eigen::Index N = params.n_antennas;
        const Eigen::Index nl = N * params.n_paths;
        double energy = 0.0;
        for (int t = 0; t < params.n_snapshots; ++t)
            for (int l = 0; l < params.n_paths; ++l)
            {
                const Eigen::Index offset = nl * t + N * l;
                auto spin = [&](int n) { return 2.0 * b(offset + n) - 1.0; };
                for (const auto &e : params.edges[l])
                    energy += e.beta * spin(e.n) * spin(e.m);
                for (int n = 0; n < N; ++n)
                    energy += params.gamma(n, l) * spin(n);
            }
        return energy;
    }

    double energy_gap(const IsingParams &params, const RVector &b, Eigen::Index index)
    {
        if (b.size() != params.size() || index < 0 || index >= b.size())
            throw InvalidParameter("energy_gap: index out of range");
        const Eigen::Index N = params.n_antennas;
        const Eigen::Index nl = N * params.n_paths;
        const Eigen::Index offset = (index / nl) * nl + ((index % nl) / N) * N;
        const int l = static_cast<int>((index % nl) / N);
        const int n = static_cast<int>(index % N);

        const double s_old = 2.0 * b(index) - 1.0;
        const double s_new = -s_old;
        double field = params.gamma(n, l);
        if (!params.adjacency.empty())
        {
            for (const auto &[m, beta] : params.adjacency[l][n])
                field += beta * (2.0 * b(offset + m) - 1.0);
        }
        else
        {
            for (const auto &e : params.edges[l])
            {
                if (e.n == n)
                    field += e.beta * (2.0 * b(offset + e.m) - 1.0);
                else if (e.m == n)
                    field += e.beta * (2.0 * b(offset + e.n) - 1.0);
            }
        }
        return (s_new - s_old) * field;
    }
}
