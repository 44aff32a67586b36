// SPDX-License-Identifier: Apache-2.0
//
// The three linear-model stackings of the observation tensor:
//
//   alpha-form:  y_breve = R_breve * alpha + n   (R_breve: NKT x NLT)
//   h-form:      y_tilde = R_tilde * h     + n   (R_tilde: NTK x NLK)
//   g-form:      y_bar   = R_bar   * g     + n   (R_bar:   NKT x L)
//
// Row orderings: alpha-form stacks snapshot-major (n + N*(k + K*t)); h-form and
// g-form both stack subcarrier-major (n + N*(t + T*k)). Regressors are stored
// sparse; each row carries at most L nonzeros.

#pragma once

#include "elaa/geometry.hpp"
#include "elaa/types.hpp"

#include <cstdint>

namespace elaa
{
    enum class StackTag
    {
        AlphaForm,
        HForm,
        GForm
    };

    const char *to_string(StackTag tag);

    /// Per-antenna, per-path, per-snapshot amplitudes alpha(n,l,t).
    struct SnSField
    {
        Dims dims;
        CVector alpha; // length NLT, order n + N*(l + L*t)

        Complex operator()(int n, int l, int t) const { return alpha(alpha_index(dims, n, l, t)); }
    };

    /// Observation tensor y(n,k,t), stored in alpha-form order.
    struct ObservationTensor
    {
        Dims dims;
        CVector data; // length NKT, order n + N*(k + K*t)

        Complex operator()(int n, int k, int t) const { return data(obs_index(dims, n, k, t)); }
        Complex &operator()(int n, int k, int t) { return data(obs_index(dims, n, k, t)); }
    };

    struct StackedModel
    {
        StackTag tag = StackTag::AlphaForm;
        CVector observation; // R * parameters (noiseless unless built from data)
        CSparse regressor;
        CVector parameters; // alpha, h or g depending on the tag
    };

    /// R_breve = I_T (x) ([h_1..h_K]^T (*) (g^T (x) I_N)).
    CSparse regressor_alpha_form(const Dims &dims, const CVector &g, const CVector &h);

    /// R_tilde = I_K (x) ([alpha_1..alpha_T]^T (*) (g^T (x) I_N)).
    CSparse regressor_h_form(const Dims &dims, const CVector &g, const CVector &alpha);

    /// R_bar, rows R_{k,t} = [alpha_t^(0) .. alpha_t^(L-1)] . [h_k^(0) .. h_k^(L-1)].
    CSparse regressor_g_form(const Dims &dims, const CVector &h, const CVector &alpha);

    /// Builds the stacking `tag` from path parameters and an SnS field.
    StackedModel build_stacked_model(StackTag tag, const std::vector<PathParams> &paths,
                                     const SnSField &sns, const ArrayGeometry &geom,
                                     const OfdmConfig &ofdm);

    /// Flattens an observation tensor into the observation vector of `tag`.
    CVector stack_observations(StackTag tag, const ObservationTensor &y);

    /// Noiseless model tensor sum_l g_l alpha_t^(l) . h_k^(l).
    ObservationTensor model_tensor(const Dims &dims, const CVector &g, const CVector &h,
                                   const CVector &alpha);

    /// Index permutation p with b[i] = a[p[i]], where a and b are the
    /// observation vectors of stackings `from` and `to`.
    std::vector<std::int64_t> permutation_between_stackings(StackTag from, StackTag to, const Dims &dims);

    /// Applies a permutation produced by permutation_between_stackings.
    CVector apply_permutation(const std::vector<std::int64_t> &perm, const CVector &v);
}
