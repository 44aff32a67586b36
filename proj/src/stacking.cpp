// SPDX-License-Identifier: Apache-2.0

#include "elaa/stacking.hpp"

namespace elaa
{
    namespace
    {
        using Triplet = Eigen::Triplet<Complex>;

        // Row index of sample (n,k,t) in the h-form / g-form vectors.
        Eigen::Index ktn_index(const Dims &d, int n, int k, int t)
        {
            return n + Eigen::Index(d.N()) * (t + Eigen::Index(d.T()) * k);
        }

        void check_length(const CVector &v, Eigen::Index expected, const char *what)
        {
            if (v.size() != expected)
                throw InvalidParameter(std::string("stacking: ") + what + " has wrong length");
        }
    }

    const char *to_string(StackTag tag)
    {
        switch (tag)
        {
        case StackTag::AlphaForm:
            return "alpha-form";
        case StackTag::HForm:
            return "h-form";
        case StackTag::GForm:
            return "g-form";
        }
        return "?";
    }

    CSparse regressor_alpha_form(const Dims &d, const CVector &g, const CVector &h)
    {
        d.validate();
        check_length(g, d.L(), "g");
        check_length(h, d.nlk(), "h");

        std::vector<Triplet> entries;
        entries.reserve(static_cast<std::size_t>(d.nkt() * d.L()));
        for (int t = 0; t < d.T(); ++t)
            for (int k = 0; k < d.K(); ++k)
                for (int l = 0; l < d.L(); ++l)
                    for (int n = 0; n < d.N(); ++n)
                        entries.emplace_back(obs_index(d, n, k, t), alpha_index(d, n, l, t),
                                             g(l) * h(h_index(d, n, l, k)));
        CSparse R(d.nkt(), d.nlt());
        R.setFromTriplets(entries.begin(), entries.end());
        return R;
    }

    CSparse regressor_h_form(const Dims &d, const CVector &g, const CVector &alpha)
    {
        d.validate();
        check_length(g, d.L(), "g");
        check_length(alpha, d.nlt(), "alpha");

        std::vector<Triplet> entries;
        entries.reserve(static_cast<std::size_t>(d.nkt() * d.L()));
        for (int k = 0; k < d.K(); ++k)
            for (int t = 0; t < d.T(); ++t)
                for (int l = 0; l < d.L(); ++l)
                    for (int n = 0; n < d.N(); ++n)
                        entries.emplace_back(ktn_index(d, n, k, t), h_index(d, n, l, k),
                                             g(l) * alpha(alpha_index(d, n, l, t)));
        CSparse R(d.nkt(), d.nlk());
        R.setFromTriplets(entries.begin(), entries.end());
        return R;
    }

    CSparse regressor_g_form(const Dims &d, const CVector &h, const CVector &alpha)
    {
        d.validate();
        check_length(h, d.nlk(), "h");
        check_length(alpha, d.nlt(), "alpha");

        std::vector<Triplet> entries;
        entries.reserve(static_cast<std::size_t>(d.nkt() * d.L()));
        for (int k = 0; k < d.K(); ++k)
            for (int t = 0; t < d.T(); ++t)
                for (int l = 0; l < d.L(); ++l)
                    for (int n = 0; n < d.N(); ++n)
                        entries.emplace_back(ktn_index(d, n, k, t), l,
                                             alpha(alpha_index(d, n, l, t)) * h(h_index(d, n, l, k)));
        CSparse R(d.nkt(), d.L());
        R.setFromTriplets(entries.begin(), entries.end());
        return R;
    }

    StackedModel build_stacked_model(StackTag tag, const std::vector<PathParams> &paths,
                                     const SnSField &sns, const ArrayGeometry &geom,
                                     const OfdmConfig &ofdm)
    {
        const Dims &d = sns.dims;
        if (d.N() != geom.n_antennas || d.K() != ofdm.n_subcarriers || d.T() != ofdm.n_snapshots ||
            d.L() != static_cast<int>(paths.size()))
            throw InvalidParameter("build_stacked_model: SnS field dimensions do not match the scene");
        check_length(sns.alpha, d.nlt(), "alpha");
        for (const auto &p : paths)
            p.validate();

        CVector g(d.L());
        for (int l = 0; l < d.L(); ++l)
            g(l) = paths[l].gain;
        const CVector h = stacked_steering(geom, ofdm, paths);

        StackedModel m;
        m.tag = tag;
        switch (tag)
        {
        case StackTag::AlphaForm:
            m.regressor = regressor_alpha_form(d, g, h);
            m.parameters = sns.alpha;
            break;
        case StackTag::HForm:
            m.regressor = regressor_h_form(d, g, sns.alpha);
            m.parameters = h;
            break;
        case StackTag::GForm:
            m.regressor = regressor_g_form(d, h, sns.alpha);
            m.parameters = g;
            break;
        }
        m.observation = m.regressor * m.parameters;
        return m;
    }

    CVector stack_observations(StackTag tag, const ObservationTensor &y)
    {
        check_length(y.data, y.dims.nkt(), "observation tensor");
        if (tag == StackTag::AlphaForm)
            return y.data;
        return apply_permutation(permutation_between_stackings(StackTag::AlphaForm, tag, y.dims), y.data);
    }

    ObservationTensor model_tensor(const Dims &d, const CVector &g, const CVector &h, const CVector &alpha)
    {
        check_length(g, d.L(), "g");
        check_length(h, d.nlk(), "h");
        check_length(alpha, d.nlt(), "alpha");

        ObservationTensor y{d, CVector::Zero(d.nkt())};
        for (int t = 0; t < d.T(); ++t)
            for (int k = 0; k < d.K(); ++k)
                for (int l = 0; l < d.L(); ++l)
                {
                    const Complex gl = g(l);
                    for (int n = 0; n < d.N(); ++n)
                        y(n, k, t) += gl * alpha(alpha_index(d, n, l, t)) * h(h_index(d, n, l, k));
                }
        return y;
    }

    std::vector<std::int64_t> permutation_between_stackings(StackTag from, StackTag to, const Dims &d)
    {
        if (d.N() < 1 || d.K() < 1 || d.T() < 1)
            throw InvalidParameter("permutation_between_stackings: invalid dimensions");

        // Position of sample (n,k,t) in a given stacking.
        auto position = [&d](StackTag tag, int n, int k, int t) -> std::int64_t
        {
            return tag == StackTag::AlphaForm ? obs_index(d, n, k, t) : ktn_index(d, n, k, t);
        };

        std::vector<std::int64_t> perm(static_cast<std::size_t>(d.nkt()));
        for (int t = 0; t < d.T(); ++t)
            for (int k = 0; k < d.K(); ++k)
                for (int n = 0; n < d.N(); ++n)
                    perm[static_cast<std::size_t>(position(to, n, k, t))] = position(from, n, k, t);
        return perm;
    }

    CVector apply_permutation(const std::vector<std::int64_t> &perm, const CVector &v)
    {
        if (static_cast<Eigen::Index>(perm.size()) != v.size())
            throw InvalidParameter("apply_permutation: length mismatch");
        CVector out(v.size());
        for (std::size_t i = 0; i < perm.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = v(perm[i]);
        return out;
    }
}
