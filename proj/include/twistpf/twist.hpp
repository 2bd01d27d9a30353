#pragma once

// The twisted form layer.  A regulated integrand is represented relative to
// the twist T = prod_i x_i^rho_i * U^lambda_u * F^-sigma: the value
// Q / F^a * T * Omega_0 is stored as just (Q, a) with Q homogeneous of degree
// (L+1)a.  The exponent bookkeeping lives in TwistSpec; t_derivative and
// log_gradient_residual implement the two identities everything else is
// built from:
//
//   d/dt [Q/F^a]            -> (F dQ/dt - (a+sigma) Q dF/dt) / F^(a+1)
//
//   d beta(C) = (a-1+sigma) (C.grad F)/F^a
//             - (div C + sum_i rho_i C_i/x_i + lambda_u (C.grad U)/U) / F^(a-1)
//
// (both up to the common factor T * Omega_0), where beta(C) is the twisted
// (n-2)-form assembled from C with alternating-sign contractions of Omega_0.

#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "homopoly.hpp"

namespace twistpf {

struct TwistSpec {
    int delta = 0;             // spacetime half-dimension shift: D = 2*delta - 2*eps
    std::vector<int> nu;       // propagator exponents
    std::vector<int> mu;       // analytic-regulator weights
    long L = 0;                // loop order

    ParamField sigma;               // negated F exponent
    ParamField lambda_u;            // U exponent
    std::vector<ParamField> rho;    // x_i exponents of the twist

    int nvars() const { return static_cast<int>(nu.size()); }

    // (a - 1 + sigma): the factor relating C.grad F at pole a to the
    // once-lowered numerator.  Nonzero for every a >= 1 at symbolic eps.
    ParamField pole_factor(int a) const { return ParamField(Rat(a - 1)) + sigma; }
};

inline TwistSpec make_twist(int delta, const std::vector<int>& nu, const std::vector<int>& mu, long L) {
    if (nu.size() != mu.size()) throw std::invalid_argument("nu and mu must have equal length");
    if (nu.empty()) throw std::invalid_argument("empty exponent lists");
    TwistSpec t;
    t.delta = delta;
    t.nu = nu;
    t.mu = mu;
    t.L = L;
    ParamField eps = ParamField::variable(sym_eps());
    ParamField kap = ParamField::variable(sym_kap());
    long nusum = 0, musum = 0;
    for (int v : nu) nusum += v;
    for (int v : mu) musum += v;
    t.sigma = ParamField(Rat(nusum - L * delta)) + ParamField(Rat(L)) * eps + ParamField(Rat(musum)) * kap;
    t.lambda_u = ParamField(Rat(nusum - (L + 1) * delta)) + ParamField(Rat(L + 1)) * eps +
                 ParamField(Rat(musum)) * kap;
    t.rho.reserve(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i)
        t.rho.push_back(ParamField(Rat(nu[i] - 1)) + ParamField(Rat(mu[i])) * kap);
    return t;
}

// Immutable bundle threaded through the reduction: the Symanzik data after
// substitutions, the twist, and cached gradients.
struct ReductionContext {
    HomoPoly U, F;
    TwistSpec twist;
    int nvars = 0;
    long L = 0;
    std::vector<HomoPoly> gradU, gradF;

    long numerator_degree(int a) const { return (L + 1) * a; }
};

inline ReductionContext make_context(const HomoPoly& U, const HomoPoly& F, TwistSpec twist) {
    ReductionContext ctx;
    ctx.U = U;
    ctx.F = F;
    ctx.twist = std::move(twist);
    ctx.nvars = U.nvars();
    ctx.L = U.degree();
    if (F.degree() != ctx.L + 1) throw std::invalid_argument("F must have degree L+1");
    if (F.nvars() != ctx.nvars) throw std::invalid_argument("U and F arity mismatch");
    if (ctx.twist.nvars() != ctx.nvars)
        throw std::invalid_argument("twist exponent lists do not match the edge count");
    if (ctx.twist.L != ctx.L) throw std::invalid_argument("twist loop order does not match U");
    if (F.is_zero()) throw std::invalid_argument("F vanishes identically");
    ctx.gradU.reserve(ctx.nvars);
    ctx.gradF.reserve(ctx.nvars);
    for (int i = 0; i < ctx.nvars; ++i) {
        ctx.gradU.push_back(U.dx(i));
        ctx.gradF.push_back(F.dx(i));
    }
    return ctx;
}

struct TwistedForm {
    HomoPoly Q;
    int a = 0;  // pole order of F
};

inline void check_form(const ReductionContext& ctx, const TwistedForm& f) {
    if (f.a < 0) throw std::invalid_argument("negative pole order");
    if (!f.Q.is_zero() && f.Q.degree() != ctx.numerator_degree(f.a))
        throw std::invalid_argument("numerator degree does not match the pole order");
}

// The regulated integrand itself: numerator 1 at pole order 0 (the twist
// carries all the exponents).
inline TwistedForm make_form(const ReductionContext& ctx) { return TwistedForm{HomoPoly::one(ctx.nvars), 0}; }

// Derivative with respect to any parameter symbol (the deformation variable
// in the driver; commutation in two symbols is a test invariant).
inline TwistedForm t_derivative(const ReductionContext& ctx, const TwistedForm& f, Symbol t) {
    check_form(ctx, f);
    ParamField amount = ParamField(Rat(f.a)) + ctx.twist.sigma;
    HomoPoly dF = ctx.F.dparam(t);
    HomoPoly out = ctx.F * f.Q.dparam(t) - (dF * f.Q).scale(amount);
    return TwistedForm{std::move(out), f.a + 1};
}

// Labeled components of d beta(C) against the pole ladder:
//   d beta = A/F^a + B/F^(a-1) + U_comp/(U F^(a-1)) + sum_i x_comp[i]/(x_i F^(a-1)),
// all multiplied by the twist.  For a valid reduction step U_comp and every
// x_comp vanish; they are reported so a verifier can pinpoint any violation.
struct LogGradientParts {
    int a = 0;
    HomoPoly A;                    // (a-1+sigma) * C.grad F
    HomoPoly B;                    // -(div C + lambda_u c + sum_i rho_i quo(C_i, x_i))
    HomoPoly c;                    // canonical quotient of C.grad U by U
    HomoPoly U_comp;               // -lambda_u * rem(C.grad U, U)
    std::vector<HomoPoly> x_comp;  // -rho_i * rem(C_i, x_i)
    bool clean() const {
        if (!U_comp.is_zero()) return false;
        for (const auto& p : x_comp)
            if (!p.is_zero()) return false;
        return true;
    }
};

inline LogGradientParts log_gradient_residual(const ReductionContext& ctx, int a,
                                              const std::vector<HomoPoly>& C) {
    if (a < 1) throw std::invalid_argument("pole order must be at least 1");
    if (static_cast<int>(C.size()) != ctx.nvars) throw std::invalid_argument("C arity mismatch");
    const long dC = (ctx.L + 1) * a - ctx.L;
    for (const auto& Ci : C)
        if (!Ci.is_zero() && Ci.degree() != dC)
            throw std::invalid_argument("C component degree does not match the pole order");

    LogGradientParts out;
    out.a = a;
    HomoPoly P = dot_grad(C, ctx.F);
    out.A = P.scale(ctx.twist.pole_factor(a));

    HomoPoly w = dot_grad(C, ctx.U);
    HomoPoly rem(ctx.nvars, w.degree());
    if (!w.is_zero())
        w.divide_by(ctx.U, out.c, rem);
    else
        out.c = HomoPoly(ctx.nvars, (ctx.L + 1) * (a - 1));
    out.U_comp = -rem.scale(ctx.twist.lambda_u);

    HomoPoly B = divergence(C);
    if (!ctx.twist.lambda_u.is_zero()) B += out.c.scale(ctx.twist.lambda_u);
    out.x_comp.assign(ctx.nvars, HomoPoly(ctx.nvars, dC));
    for (int i = 0; i < ctx.nvars; ++i) {
        if (ctx.twist.rho[i].is_zero() || C[i].is_zero()) continue;
        HomoPoly quo, remi;
        C[i].divide_by_var(i, quo, remi);
        B += quo.scale(ctx.twist.rho[i]);
        out.x_comp[i] = -remi.scale(ctx.twist.rho[i]);
    }
    out.B = -B;
    return out;
}

inline LogGradientParts log_gradient_residual(const ReductionContext& ctx, const TwistedForm& f,
                                              const std::vector<HomoPoly>& C) {
    check_form(ctx, f);
    return log_gradient_residual(ctx, f.a, C);
}

}  // namespace twistpf
