#pragma once

// Operator search and certificate verification.  The driver differentiates
// the regulated integrand in t, reduces every derivative to its normal form,
// and looks for the first linear dependency of the normal-form vectors over
// the parameter field; the dependency coefficients are the minimal ODE.  The
// concatenated reduction certificates, scaled by the normalized operator
// coefficients, certify exactness: the verifier recomputes every d(beta)
// expansion from scratch and demands that the weighted derivative tower
// cancels identically.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffop.hpp"
#include "reduce.hpp"

namespace twistpf {

struct OperatorSearchOptions {
    int max_order = 0;  // 0 = automatic (residue-space dimension bound)
    int threads = 1;
};

struct OperatorSearch {
    bool found = false;
    DiffOperator op;
    ReductionCertificate certificate;
    std::map<int, int> complement_dims;  // pole level -> canonical complement dimension
    std::vector<int> ranks;              // rank of the normal-form matrix after adding f_k
    int orders_tried = 0;                // highest derivative order examined
};

namespace detail {

// Flatten a normal form against the slot layout [level0, R_1, R_2, ..., R_K].
inline std::vector<ParamField> flatten_nf(const NormalForm& nf, const std::vector<int>& dims, int K) {
    std::vector<ParamField> out;
    out.push_back(nf.level0);
    for (int a = 1; a <= K; ++a) {
        auto it = nf.residues.find(a);
        for (int j = 0; j < dims[a]; ++j)
            out.push_back(it != nf.residues.end() ? it->second[j] : ParamField());
    }
    return out;
}

}  // namespace detail

namespace detail {

inline void append_scaled(ReductionCertificate& cert, const ReductionCertificate& steps,
                          const ParamField& w) {
    for (const auto& step : steps) {
        bool inert = step.c.is_zero();
        for (const auto& Ci : step.C)
            if (!Ci.is_zero()) inert = false;
        if (inert) continue;
        ReductionStep scaled;
        scaled.a = step.a;
        scaled.c = step.c.scale(w);
        scaled.C.reserve(step.C.size());
        for (const auto& Ci : step.C) scaled.C.push_back(Ci.scale(w));
        cert.push_back(std::move(scaled));
    }
}

}  // namespace detail

inline OperatorSearch minimal_operator(const ReductionContext& ctx, Symbol t,
                                       const OperatorSearchOptions& opts = {}) {
    OperatorSearch out;
    LevelCache cache;
    std::vector<NormalFormResult> nfs;
    std::map<int, std::vector<ExactVector>> syz;  // level -> certified exact classes
    TwistedForm f = make_form(ctx);

    for (int k = 0;; ++k) {
        if (k > 0) f = t_derivative(ctx, f, t);
        nfs.push_back(normal_form(ctx, cache, f, opts.threads));
        out.orders_tried = k;

        std::vector<int> dims(k + 1, 0);
        int total = 1;
        for (int a = 1; a <= k; ++a) {
            dims[a] = cache.get(ctx, a, opts.threads)->complement_dim();
            out.complement_dims[a] = dims[a];
            total += dims[a];
        }

        // Dependency test at order k: fix c_k = 1 and solve for c_0..c_{k-1}
        // together with free weights on the exact classes.  Syzygies from
        // levels <= k reuse levels the descent has already built; syzygies of
        // the level-(k+1) system still land at pole k, so that level is built
        // as a last resort before the order grows.
        int rank_k = 0;
        for (int hi = k; hi <= k + 1; ++hi) {
            for (int a = 1; a <= hi; ++a)
                if (!syz.count(a)) syz.emplace(a, syzygy_normal_forms(ctx, cache, a, opts.threads));
            std::vector<const ExactVector*> exacts;
            for (const auto& [a, vecs] : syz)
                for (const auto& v : vecs) exacts.push_back(&v);

            std::vector<std::vector<ParamField>> cols;
            cols.reserve(k + exacts.size());
            for (int j = 0; j < k; ++j) cols.push_back(detail::flatten_nf(nfs[j].nf, dims, k));
            for (const ExactVector* v : exacts) cols.push_back(detail::flatten_nf(v->nf, dims, k));
            std::vector<ParamField> vk = detail::flatten_nf(nfs[k].nf, dims, k);

            std::vector<std::vector<ParamField>> A(total, std::vector<ParamField>(cols.size()));
            std::vector<ParamField> b(total);
            for (int s = 0; s < total; ++s) {
                for (std::size_t c = 0; c < cols.size(); ++c) A[s][c] = cols[c][s];
                b[s] = -vk[s];
            }
            auto res = solve_linear(A, b);
            rank_k = res.rank + (res.consistent ? 0 : 1);
            if (!res.consistent) continue;

            std::vector<ParamField> c(res.solution.begin(), res.solution.begin() + k);
            c.push_back(ParamField(Rat(1)));
            out.op = make_operator(t, c);
            out.found = true;
            out.ranks.push_back(rank_k);

            // The certificate carries every step scaled by the weight its
            // class receives after clearing denominators: w = coeffs[k] for
            // the normalization c_k = 1.
            ParamField unit(out.op.coeffs[k]);
            for (int j = 0; j <= k; ++j) {
                ParamField w(out.op.coeffs[j]);
                if (!w.is_zero()) detail::append_scaled(out.certificate, nfs[j].certificate, w);
            }
            for (std::size_t j = 0; j < exacts.size(); ++j) {
                ParamField w = res.solution[k + j] * unit;
                if (!w.is_zero()) detail::append_scaled(out.certificate, exacts[j]->certificate, w);
            }
            return out;
        }
        out.ranks.push_back(rank_k);

        if (opts.max_order > 0 && k >= opts.max_order) return out;  // bound exceeded, found == false
        if (opts.max_order == 0 && k > total + 1)
            throw std::logic_error("dependency bound exceeded the residue-space dimension");
    }
}

struct VerifyReport {
    bool ok = false;
    bool exactness_ok = false;     // weighted derivative tower cancels identically
    bool structure_ok = false;     // no poles beyond F powers and the declared twist factors
    bool scalars_ok = false;       // stored Step-2 scalars match the canonical quotients
    int failed_step = -1;          // first offending certificate step, if any
    HomoPoly residual;             // exactness defect over the common denominator F^amax
    std::string message;
};

// Independent replay: recompute the derivative tower and every certificate
// expansion by direct polynomial arithmetic; nothing from the search is
// trusted beyond the certificate itself.
inline VerifyReport verify_operator(const ReductionContext& ctx, Symbol t, const DiffOperator& op,
                                    const ReductionCertificate& certificate) {
    VerifyReport rep;
    rep.structure_ok = true;
    rep.scalars_ok = true;
    const int order = op.order();
    int amax = order;
    for (const auto& step : certificate) amax = std::max(amax, step.a);

    std::vector<HomoPoly> Fpow(amax + 1);
    Fpow[0] = HomoPoly::one(ctx.nvars);
    for (int k = 1; k <= amax; ++k) Fpow[k] = Fpow[k - 1] * ctx.F;

    // Sum of c_k * Q_k * F^(amax-k) over the derivative tower.
    HomoPoly target(ctx.nvars, (ctx.L + 1) * amax);
    TwistedForm f = make_form(ctx);
    for (int k = 0; k <= order; ++k) {
        if (k > 0) f = t_derivative(ctx, f, t);
        ParamField ck(op.coeffs[k]);
        if (ck.is_zero()) continue;
        target += (f.Q * Fpow[amax - k]).scale(ck);
    }

    // Sum of d(beta) expansions, each weighted by 1/(a-1+sigma).
    HomoPoly certsum(ctx.nvars, (ctx.L + 1) * amax);
    for (std::size_t s = 0; s < certificate.size(); ++s) {
        const ReductionStep& step = certificate[s];
        if (step.a < 1 || step.a > amax) {
            rep.structure_ok = false;
            rep.failed_step = static_cast<int>(s);
            rep.message = "certificate step has pole order outside the tower";
            return rep;
        }
        LogGradientParts parts = log_gradient_residual(ctx, step.a, step.C);
        if (!parts.clean()) {
            rep.structure_ok = false;
            rep.failed_step = static_cast<int>(s);
            rep.message = "certificate step introduces a pole beyond the declared twist factors";
            return rep;
        }
        if (parts.c != step.c) {
            rep.scalars_ok = false;
            rep.failed_step = static_cast<int>(s);
            rep.message = "stored Step-2 scalar disagrees with the canonical quotient";
            return rep;
        }
        ParamField w = ctx.twist.pole_factor(step.a).inverse();
        certsum += (parts.A * Fpow[amax - step.a]).scale(w);
        certsum += (parts.B * Fpow[amax - step.a + 1]).scale(w);
    }

    rep.residual = target - certsum;
    rep.exactness_ok = rep.residual.is_zero();
    rep.ok = rep.exactness_ok && rep.structure_ok && rep.scalars_ok;
    if (!rep.exactness_ok) {
        rep.message = "exactness defect: residual has " + std::to_string(rep.residual.term_count()) +
                      " terms, leading monomial " +
                      (rep.residual.is_zero() ? std::string("-") : rep.residual.to_string().substr(0, 64));
    } else if (rep.ok) {
        rep.message = "certificate verifies: the weighted derivative tower is exact";
    }
    return rep;
}

}  // namespace twistpf
