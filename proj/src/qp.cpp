// SPDX-License-Identifier: Apache-2.0

#include "elaa/qp.hpp"

#include <algorithm>
#include <cmath>

namespace elaa
{
    void QpProblem::validate() const
    {
        const Eigen::Index n = r.size();
        if (E.rows() != n || E.cols() != n || eta.size() != n)
            throw InvalidParameter("QpProblem: E, r and eta must share the dimension NLT");
        if (replicas < 1 || n % replicas != 0)
            throw InvalidParameter("QpProblem: NLT must be a multiple of the replication count");
        if (!r.allFinite())
            throw InvalidParameter("QpProblem: linear term must be finite");
        if ((eta.array() < 0.0).any() || (eta.array() > 0.25).any())
            throw InvalidParameter("QpProblem: eta entries must lie in [0, 0.25]");
    }

    double qp_objective(const QpProblem &qp, const RVector &b)
    {
        return 2.0 * b.dot(qp.E * b) + qp.r.dot(b);
    }

    QpProblem make_qp(const IsingParams &ising, const RVector &r1, double eta)
    {
        QpProblem qp;
        qp.E = ising.assemble_interaction();
        if (r1.size() != qp.E.rows())
            throw InvalidParameter("make_qp: evidence length does not match NLT");
        const RVector ones = RVector::Ones(r1.size());
        const RVector r2 = -2.0 * (RSparse(qp.E.transpose()) * ones);
        const RVector r3 = 2.0 * ising.assemble_bias();
        qp.r = r1 + r2 + r3;
        qp.eta = RVector::Constant(r1.size(), eta);
        qp.replicas = ising.n_snapshots;
        qp.validate();
        return qp;
    }

    RVector evidence_from_alpha(const CVector &alpha, double sigma_b2, double sigma_v2)
    {
        if (!(sigma_b2 > 0.0) || !(sigma_v2 > 0.0))
            throw InvalidParameter("evidence_from_alpha: variances must be positive");
        RVector r1(alpha.size());
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            r1(i) = std::norm(alpha(i) - 1.0) / sigma_v2 - std::norm(alpha(i)) / sigma_b2;
        return r1;
    }

    namespace
    {
        // The problem restricted to the NL free variables of one replication:
        //     F(x) = c * x^T B x + s^T x,  c = 2T, B = first diagonal block of E.
        struct TiedProblem
        {
            RSparse B;
            RVector s;
            RVector eta;
            double c = 2.0;
            int T = 1;

            double value(const RVector &x) const { return c * x.dot(B * x) + s.dot(x); }
        };

        TiedProblem tie(const QpProblem &qp)
        {
            const Eigen::Index nl = qp.size() / qp.replicas;
            TiedProblem p;
            p.T = qp.replicas;
            p.c = 2.0 * qp.replicas;
            p.B = qp.E.topLeftCorner(nl, nl);
            p.s = RVector::Zero(nl);
            p.eta = RVector::Constant(nl, 0.25);
            for (int t = 0; t < qp.replicas; ++t)
            {
                p.s += qp.r.segment(nl * t, nl);
                p.eta = p.eta.cwiseMin(qp.eta.segment(nl * t, nl));
            }
            return p;
        }

        RVector replicate(const RVector &x, int T)
        {
            RVector out(x.size() * T);
            for (int t = 0; t < T; ++t)
                out.segment(x.size() * t, x.size()) = x;
            return out;
        }

        // Greedy best-improvement flips of contiguous index intervals, single
        // flips included. Flipping the set S with directions d changes the
        // objective by sum_S d_i (2c (Bx)_i + s_i) + c sum_{i != j in S} d_i d_j B_ij
        // since B is symmetric with a zero diagonal.
        void interval_descent(const TiedProblem &p, RVector &x)
        {
            const Eigen::Index n = x.size();
            RVector Bx = p.B * x;
            for (Eigen::Index pass = 0; pass < 4 * n + 4; ++pass)
            {
                Eigen::Index best_a = -1, best_b = -1;
                double best_delta = -1e-12;
                for (Eigen::Index a = 0; a < n; ++a)
                {
                    double delta = 0.0;
                    for (Eigen::Index b = a; b < n; ++b)
                    {
                        const double db = x(b) > 0.5 ? -1.0 : 1.0;
                        double coupling = 0.0;
                        for (RSparse::InnerIterator it(p.B, b); it; ++it)
                            if (it.row() >= a && it.row() < b)
                                coupling += (x(it.row()) > 0.5 ? -1.0 : 1.0) * it.value();
                        delta += db * (2.0 * p.c * Bx(b) + p.s(b)) + 2.0 * p.c * db * coupling;
                        if (delta < best_delta)
                        {
                            best_delta = delta;
                            best_a = a;
                            best_b = b;
                        }
                    }
                }
                if (best_a < 0)
                    return;
                for (Eigen::Index i = best_a; i <= best_b; ++i)
                {
                    const double dir = x(i) > 0.5 ? -1.0 : 1.0;
                    x(i) += dir;
                    for (RSparse::InnerIterator it(p.B, i); it; ++it)
                        Bx(it.row()) += dir * it.value();
                }
            }
        }
    }

    QpResult step_b(const QpProblem &qp, const QpSettings &settings, const std::optional<RVector> &warm_start)
    {
        qp.validate();
        const TiedProblem p = tie(qp);
        const Eigen::Index nl = p.s.size();

        RVector x;
        if (warm_start)
        {
            if (warm_start->size() != qp.size())
                throw InvalidParameter("step_b: warm start has wrong length");
            x = warm_start->head(nl).cwiseMax(0.0).cwiseMin(1.0);
        }
        else
            x = RVector::Constant(nl, 0.5);

        // Problem scale for the initial penalty and the gradient Lipschitz bound.
        double b_norm = 0.0;
        for (Eigen::Index j = 0; j < p.B.outerSize(); ++j)
        {
            double col = 0.0;
            for (RSparse::InnerIterator it(p.B, j); it; ++it)
                col += std::abs(it.value());
            b_norm = std::max(b_norm, col);
        }
        const double quad_lip = 2.0 * p.c * b_norm;
        const double scale = std::max({p.s.cwiseAbs().maxCoeff(), quad_lip, 1e-12});
        double mu = settings.penalty0 * scale;

        auto surrogate = [&](const RVector &v, double weight)
        {
            return p.value(v) + weight * p.T * (v.array() * (1.0 - v.array())).sum();
        };

        QpResult result;
        bool feasible = false;
        for (int level = 0; level < settings.max_levels; ++level)
        {
            result.level_starts.push_back(static_cast<int>(result.surrogate.size()));
            const double lip = quad_lip + 2.0 * mu * p.T;
            const double step = 1.0 / std::max(lip, 1e-300);
            double current = surrogate(x, mu);
            result.surrogate.push_back(current);
            for (int it = 0; it < settings.max_inner; ++it)
            {
                const RVector grad = 2.0 * p.c * (p.B * x) + p.s + mu * p.T * (1.0 - 2.0 * x.array()).matrix();
                const RVector next = (x - step * grad).cwiseMax(0.0).cwiseMin(1.0);
                const double value = surrogate(next, mu);
                ++result.iterations;
                if (value > current)
                    break; // cannot happen with step = 1/Lipschitz except through rounding noise
                const double moved = (next - x).cwiseAbs().maxCoeff();
                x = next;
                current = value;
                result.surrogate.push_back(current);
                if (moved < settings.step_tol)
                    break;
            }
            const RVector slack = x.array() * (1.0 - x.array());
            if ((slack.array() <= p.eta.array()).all())
            {
                feasible = true;
                break;
            }
            mu *= 2.0;
        }

        RVector rounded = (x.array() >= settings.threshold).cast<double>();
        if (settings.flip_polish)
            interval_descent(p, rounded);

        result.converged = feasible;
        result.relaxed = replicate(x, p.T);
        result.rounded = replicate(rounded, p.T);
        result.objective = qp_objective(qp, result.rounded);
        return result;
    }
}
